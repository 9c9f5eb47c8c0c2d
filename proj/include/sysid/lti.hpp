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
#ifndef SYSID_LTI_HPP
#define SYSID_LTI_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sysid/linalg.hpp"

namespace sysid {

/**
 * @brief Ground-truth system x_{t+1} = A x_t + B u_t + w_t.
 *
 * w_t ~ N(0, sigma_w^2 I) and the excitation u_t ~ N(0, sigma_u^2 I).
 * A scalar system is the 1x1 case.
 */
class LtiSystem {
public:
  LtiSystem(Matrix a, Matrix b, double sigma_w, double sigma_u);

  static LtiSystem scalar(double a, double sigma_w, double sigma_u);

  /// A = [[1, 0.1], [0, 1]], B = [0; 1], sigma_w = 0.1, sigma_u = 1.
  static LtiSystem double_integrator();

  /// Planar rotation by `angle` radians (orthogonal A), no input channel.
  static LtiSystem rotation(double angle, double sigma_w);

  const Matrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  double sigma_w() const noexcept { return sigma_w_; }
  double sigma_u() const noexcept { return sigma_u_; }
  std::size_t n_x() const noexcept { return static_cast<std::size_t>(a_.rows()); }
  std::size_t n_u() const noexcept { return static_cast<std::size_t>(b_.cols()); }

  /// Stacked parameter [A B] (n_x x (n_x + n_u)).
  Matrix theta() const;

private:
  Matrix a_;
  Matrix b_;
  double sigma_w_;
  double sigma_u_;
};

/// One experiment of a batch: rows t = 0..T of states and inputs.
struct ExperimentRecord {
  RowMatrix states;  // (T+1) x n_x
  RowMatrix inputs;  // (T+1) x n_u; the row at t = T enters no transition
};

struct TrajectoryBatch {
  std::size_t n_x = 0;
  std::size_t n_u = 0;
  std::size_t horizon = 0;  // T
  std::uint64_t seed = 0;
  std::vector<ExperimentRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  /// Throws DimensionMismatch/InvalidArgument when records disagree.
  void validate() const;
};

struct SingleTrajectory {
  std::size_t n_x = 0;
  std::size_t n_u = 0;  // 0 for autonomous rollouts
  std::uint64_t seed = 0;
  RowMatrix states;  // (T+1) x n_x
  RowMatrix inputs;  // T x n_u

  std::size_t horizon() const noexcept {
    return states.rows() == 0 ? 0 : static_cast<std::size_t>(states.rows() - 1);
  }
  bool autonomous() const noexcept { return n_u == 0; }
  void validate() const;
};

/**
 * @brief Finite-horizon controllability Gramian sum_{t=0}^{T} A^t B B^T (A^T)^t.
 *
 * Computed by iterating M <- A M A^T + B B^T, then symmetrized.
 */
Matrix gramian(const Matrix& a, const Matrix& b, std::size_t horizon);

/// sigma_u^2 gramian(A, B, T) + sigma_w^2 gramian(A, I, T).
Matrix state_covariance(const LtiSystem& sys, std::size_t horizon);

/// blkdiag(state_covariance(sys, T), sigma_u^2 I).
Matrix joint_covariance(const LtiSystem& sys, std::size_t horizon);

/**
 * Covariance of the simulated state x_t (x_0 = 0): zero at t = 0, otherwise
 * state_covariance(sys, t - 1).
 */
Matrix covariate_covariance(const LtiSystem& sys, std::size_t t);

/// Covariance of x_t for the noise-only recursion: Gamma_t = sigma_w^2 sum_{j<t} A^j A^jT.
Matrix noise_gramian(const Matrix& a, double sigma_w, std::size_t t);

/**
 * @brief N independent rollouts from x_0 = 0, rows t = 0..T each.
 *
 * Noise for experiment i is keyed on (seed, i, stream, t, component), so the
 * result is identical for any thread count.
 */
TrajectoryBatch simulate_batch(const LtiSystem& sys, std::size_t n_experiments, std::size_t horizon,
                               std::uint64_t seed, unsigned threads = 1);

struct SingleOptions {
  bool autonomous = false;
  std::optional<Vector> x0;  // defaults to zero
};

SingleTrajectory simulate_single(const LtiSystem& sys, std::size_t horizon, std::uint64_t seed,
                                 const SingleOptions& options = {});

} // namespace sysid

#endif // SYSID_LTI_HPP
