/*
 Copyright 2026 The sysid Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <atomic>
#include <string>

#include "sysid/error.hpp"
#include "sysid/kernels.hpp"

namespace sysid::kernels {

namespace {

std::atomic<int>& active_slot() {
  static std::atomic<int> slot{static_cast<int>(detect_isa())};
  return slot;
}

} // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
  case Isa::Scalar: return "scalar";
  case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa detect_isa() {
#if SYSID_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2")) {
    return Isa::Avx2;
  }
#endif
  return Isa::Scalar;
}

Isa active_isa() {
  return static_cast<Isa>(active_slot().load(std::memory_order_relaxed));
}

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && detect_isa() != Isa::Avx2) {
    throw Error(ErrorCode::InvalidArgument, "AVX2 kernels requested on a CPU without AVX2");
  }
  active_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void accumulate_moments(const MomentArgs& args) {
  if (args.z.size() < args.rows * args.d || args.y.size() < args.rows * args.m ||
      args.gram.size() != args.d * args.d || args.cross.size() != args.d * args.m) {
    throw Error(ErrorCode::DimensionMismatch,
                "moment accumulation buffers do not match rows=" + std::to_string(args.rows) +
                    " d=" + std::to_string(args.d) + " m=" + std::to_string(args.m));
  }
  switch (active_isa()) {
#if SYSID_HAVE_AVX2_KERNELS
  case Isa::Avx2:
    avx2::accumulate_moments(args);
    return;
#endif
  default:
    scalar::accumulate_moments(args);
    return;
  }
}

} // namespace sysid::kernels
