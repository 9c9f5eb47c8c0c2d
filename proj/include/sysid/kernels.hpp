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
#ifndef SYSID_KERNELS_HPP
#define SYSID_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string_view>

// Second-moment accumulation kernels used by every least-squares fit.
//
// Layout: z is rows x d and y is rows x m, both row-major and contiguous.
// gram (d x d) and cross (d x m) are row-major accumulators:
//   gram  += sum_r z_r z_r^T
//   cross += sum_r z_r y_r^T
// Every variant performs the same per-element multiply-then-add sequence in
// row order, so all variants return bit-identical results.

namespace sysid::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct MomentArgs {
  std::span<const double> z;
  std::span<const double> y;  // may be empty when m == 0
  std::size_t rows = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  std::span<double> gram;
  std::span<double> cross;
};

namespace scalar {
void accumulate_moments(const MomentArgs& args);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SYSID_HAVE_AVX2_KERNELS 1
namespace avx2 {
void accumulate_moments(const MomentArgs& args);
} // namespace avx2
#else
#define SYSID_HAVE_AVX2_KERNELS 0
#endif

/// Best ISA supported by the running CPU.
Isa detect_isa();

/// ISA currently used by the dispatcher (detected once, can be overridden).
Isa active_isa();

/// Forces the dispatcher onto a given ISA. Throws InvalidArgument if the CPU lacks it.
void set_active_isa(Isa isa);

/// Validates shapes, then runs the active variant.
void accumulate_moments(const MomentArgs& args);

} // namespace sysid::kernels

#endif // SYSID_KERNELS_HPP
