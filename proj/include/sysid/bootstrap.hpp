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
#ifndef SYSID_BOOTSTRAP_HPP
#define SYSID_BOOTSTRAP_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sysid/linalg.hpp"
#include "sysid/lti.hpp"

namespace sysid {

struct BootstrapSample {
  double eps_a = 0.0;  // ||A_hat - A_tilde||_2, +inf for a singular refit
  double eps_b = 0.0;  // ||B_hat - B_tilde||_2
};

struct BootstrapResult {
  double eps_a = 0.0;
  double eps_b = 0.0;
  std::vector<BootstrapSample> samples;
  std::size_t trials = 0;
  std::size_t singular_trials = 0;
  double delta = 0.05;
  std::uint64_t seed = 0;
};

struct BootstrapConfig {
  std::size_t trials = 200;  // M
  double delta = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Nearest-rank percentile: element ceil(M (1 - delta)) (1-based) of the ascending sort.
double nearest_rank_percentile(std::vector<double> values, double delta);

/**
 * @brief Bootstrap estimate of the spectral errors of (A_hat, B_hat).
 *
 * Each trial rolls every trajectory of `data` forward under (A_hat, B_hat)
 * from its recorded x_0 with fresh Gaussian inputs and noise, refits by
 * least squares over all transitions, and records the deviations. Trials are
 * keyed on (seed, trial), so results do not depend on the thread count.
 */
BootstrapResult bootstrap_eps(const TrajectoryBatch& data, const Matrix& a_hat, const Matrix& b_hat, double sigma_w,
                              double sigma_u, const BootstrapConfig& config);

/// sqrt(RSS / ((samples - n_x - n_u) n_x)) of the pooled fit, for when sigma_w is not supplied.
double estimate_sigma_w(const TrajectoryBatch& data, const Matrix& a_hat, const Matrix& b_hat);

} // namespace sysid

#endif // SYSID_BOOTSTRAP_HPP
