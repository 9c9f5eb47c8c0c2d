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
// Compiled with -mavx2 (no -mfma): mul and add stay separate roundings.
#include "sysid/kernels.hpp"

#include <immintrin.h>

#include <cstdint>

namespace sysid::kernels::avx2 {

namespace {

inline __m256i tail_mask(std::size_t remaining) {
  const std::int64_t r = static_cast<std::int64_t>(remaining);
  return _mm256_set_epi64x(r > 3 ? -1 : 0, r > 2 ? -1 : 0, r > 1 ? -1 : 0, r > 0 ? -1 : 0);
}

// out[0..n) += s * v[0..n), four lanes at a time.
inline void axpy_row(double* out, double s, const double* v, std::size_t n) {
  const __m256d bs = _mm256_set1_pd(s);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d prod = _mm256_mul_pd(bs, _mm256_loadu_pd(v + j));
    _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), prod));
  }
  if (j < n) {
    const __m256i mask = tail_mask(n - j);
    const __m256d prod = _mm256_mul_pd(bs, _mm256_maskload_pd(v + j, mask));
    _mm256_maskstore_pd(out + j, mask, _mm256_add_pd(_mm256_maskload_pd(out + j, mask), prod));
  }
}

} // namespace

void accumulate_moments(const MomentArgs& args) {
  const std::size_t d = args.d;
  const std::size_t m = args.m;
  double* gram = args.gram.data();
  double* cross = args.cross.data();
  for (std::size_t r = 0; r < args.rows; ++r) {
    const double* z = args.z.data() + r * d;
    const double* y = m > 0 ? args.y.data() + r * m : nullptr;
    for (std::size_t i = 0; i < d; ++i) {
      axpy_row(gram + i * d, z[i], z, d);
      if (m > 0) {
        axpy_row(cross + i * m, z[i], y, m);
      }
    }
  }
}

} // namespace sysid::kernels::avx2
