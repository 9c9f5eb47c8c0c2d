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
#ifndef SYSID_ESTIMATORS_HPP
#define SYSID_ESTIMATORS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sysid/linalg.hpp"
#include "sysid/lti.hpp"

namespace sysid {

/// Covariates z (rows) and responses y (rows) of a linear regression y = Theta z + w.
struct RegressionData {
  RowMatrix z;  // samples x n
  RowMatrix y;  // samples x l
};

/// (x_{T-1}, u_{T-1}) -> x_T for every experiment. Requires horizon >= 1.
RegressionData last_step_data(const TrajectoryBatch& batch);

/// Every transition t = 0..T-1 of every experiment, experiment-major.
RegressionData pooled_data(const TrajectoryBatch& batch);

enum class SingleMode { Autonomous, Controlled };

/// z_t = x_t (autonomous) or (x_t; u_t) (controlled), y_t = x_{t+1}, t = 0..T-1.
RegressionData single_traj_data(const SingleTrajectory& traj, SingleMode mode);

struct EstimateErrors {
  Matrix error;     // theta_hat - theta_true
  double theta = 0.0;  // ||theta_hat - theta_true||_2
  double a = 0.0;      // ||A_hat - A||_2
  double b = 0.0;      // ||B_hat - B||_2 (0 when there is no input block)
};

struct Estimate {
  Matrix theta_hat;  // l x n, partitioned [A_hat B_hat]
  Matrix gram;       // Z^T Z
  std::optional<Matrix> cross;  // Z^T W, only with ground truth
  double residual_norm = 0.0;   // ||Y - Z theta_hat^T||_F
  EigenExtremes gram_eigs;
  std::size_t n_x = 0;
  std::size_t n_u = 0;
  std::size_t samples = 0;
  std::optional<EstimateErrors> errors;

  Matrix a_hat() const { return theta_hat.leftCols(n_x); }
  Matrix b_hat() const { return theta_hat.rightCols(n_u); }
};

/**
 * @brief Least-squares fit Theta_hat = (Z^T Z)^{-1} Z^T Y, transposed.
 *
 * The Gram matrix must have lambda_min >= kSingularRatio * lambda_max, else
 * SingularGram is thrown. When theta_true is given the noise is recovered as
 * W = Y - Z theta_true^T and the cross moment Z^T W plus spectral errors are filled in.
 */
Estimate ols_fit(const RegressionData& data, std::size_t n_x, std::size_t n_u,
                 const std::optional<Matrix>& theta_true = std::nullopt);

struct BatchOptions {
  /// Pool every transition instead of the last step only.
  bool pool_all_steps = false;
};

Estimate ols_batch(const TrajectoryBatch& batch, const BatchOptions& options = {},
                   const LtiSystem* truth = nullptr);

Estimate ols_single_traj(const SingleTrajectory& traj, SingleMode mode, const LtiSystem* truth = nullptr);

struct ScalarSample {
  double x = 0.0;       // x_T
  double u = 0.0;       // u_T
  double x_next = 0.0;  // x_{T+1}
};

struct ScalarEstimate {
  double a_hat = 0.0;
  double numerator = 0.0;    // sum x (x_next - u)
  double denominator = 0.0;  // sum x^2
  std::optional<double> error;  // e_N = a_hat - a
};

/// a_hat = sum x (x_next - u) / sum x^2. Throws ZeroDenominator when every x is 0.
ScalarEstimate ols_scalar_lastpoint(std::span<const ScalarSample> samples,
                                    std::optional<double> a_true = std::nullopt);

ScalarEstimate ols_scalar_lastpoint(const TrajectoryBatch& batch, std::optional<double> a_true = std::nullopt);

} // namespace sysid

#endif // SYSID_ESTIMATORS_HPP
