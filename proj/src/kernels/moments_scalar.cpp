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
#include "sysid/kernels.hpp"

namespace sysid::kernels::scalar {

void accumulate_moments(const MomentArgs& args) {
  const std::size_t d = args.d;
  const std::size_t m = args.m;
  double* gram = args.gram.data();
  double* cross = args.cross.data();
  for (std::size_t r = 0; r < args.rows; ++r) {
    const double* z = args.z.data() + r * d;
    const double* y = m > 0 ? args.y.data() + r * m : nullptr;
    for (std::size_t i = 0; i < d; ++i) {
      const double zi = z[i];
      double* grow = gram + i * d;
      for (std::size_t j = 0; j < d; ++j) {
        const double prod = zi * z[j];
        grow[j] = grow[j] + prod;
      }
      double* crow = cross + i * m;
      for (std::size_t j = 0; j < m; ++j) {
        const double prod = zi * y[j];
        crow[j] = crow[j] + prod;
      }
    }
  }
}

} // namespace sysid::kernels::scalar
