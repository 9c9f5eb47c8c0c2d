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
#include "sysid/estimators.hpp"

#include <string>

#include "sysid/error.hpp"
#include "sysid/kernels.hpp"

namespace sysid {

namespace {

struct Moments {
  Matrix gram;
  Matrix cross;
};

Moments moments(const RowMatrix& z, const RowMatrix& y) {
  const auto rows = static_cast<std::size_t>(z.rows());
  const auto d = static_cast<std::size_t>(z.cols());
  const auto m = static_cast<std::size_t>(y.cols());
  RowMatrix gram = RowMatrix::Zero(d, d);
  RowMatrix cross = RowMatrix::Zero(d, m);
  kernels::accumulate_moments({
      .z = {z.data(), rows * d},
      .y = {y.data(), rows * m},
      .rows = rows,
      .d = d,
      .m = m,
      .gram = {gram.data(), d * d},
      .cross = {cross.data(), d * m},
  });
  return {Matrix(gram), Matrix(cross)};
}

} // namespace

RegressionData last_step_data(const TrajectoryBatch& batch) {
  batch.validate();
  if (batch.horizon == 0) {
    throw Error(ErrorCode::InvalidArgument, "last-step regression needs horizon T >= 1");
  }
  const std::size_t n = batch.n_x + batch.n_u;
  const Eigen::Index last = static_cast<Eigen::Index>(batch.horizon);
  RegressionData data{RowMatrix(batch.size(), n), RowMatrix(batch.size(), batch.n_x)};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& rec = batch.records[i];
    const auto row = static_cast<Eigen::Index>(i);
    data.z.row(row).head(batch.n_x) = rec.states.row(last - 1);
    data.z.row(row).tail(batch.n_u) = rec.inputs.row(last - 1);
    data.y.row(row) = rec.states.row(last);
  }
  return data;
}

RegressionData pooled_data(const TrajectoryBatch& batch) {
  batch.validate();
  const std::size_t n = batch.n_x + batch.n_u;
  const std::size_t per = batch.horizon;
  RegressionData data{RowMatrix(batch.size() * per, n), RowMatrix(batch.size() * per, batch.n_x)};
  Eigen::Index row = 0;
  for (const auto& rec : batch.records) {
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(per); ++t, ++row) {
      data.z.row(row).head(batch.n_x) = rec.states.row(t);
      data.z.row(row).tail(batch.n_u) = rec.inputs.row(t);
      data.y.row(row) = rec.states.row(t + 1);
    }
  }
  return data;
}

RegressionData single_traj_data(const SingleTrajectory& traj, SingleMode mode) {
  traj.validate();
  const std::size_t nu = mode == SingleMode::Controlled ? traj.n_u : 0;
  if (mode == SingleMode::Controlled && traj.n_u == 0) {
    throw Error(ErrorCode::InvalidArgument, "controlled mode needs a trajectory with inputs");
  }
  const auto steps = static_cast<Eigen::Index>(traj.horizon());
  RegressionData data{RowMatrix(steps, traj.n_x + nu), RowMatrix(steps, traj.n_x)};
  data.z.leftCols(traj.n_x) = traj.states.topRows(steps);
  if (nu > 0) {
    data.z.rightCols(nu) = traj.inputs;
  }
  data.y = traj.states.bottomRows(steps);
  return data;
}

Estimate ols_fit(const RegressionData& data, std::size_t n_x, std::size_t n_u,
                 const std::optional<Matrix>& theta_true) {
  const std::size_t n = n_x + n_u;
  if (static_cast<std::size_t>(data.z.cols()) != n || data.z.rows() != data.y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "regression covariates do not match n_x + n_u");
  }
  Estimate est;
  est.n_x = n_x;
  est.n_u = n_u;
  est.samples = static_cast<std::size_t>(data.z.rows());

  Moments mom = moments(data.z, data.y);
  est.gram = symmetrize(mom.gram);
  est.gram_eigs = eigen_extremes(est.gram);
  if (!(est.gram_eigs.max > 0.0) || est.gram_eigs.min < kSingularRatio * est.gram_eigs.max) {
    throw Error(ErrorCode::SingularGram,
                "Gram matrix is numerically singular (lambda_min=" + std::to_string(est.gram_eigs.min) +
                    ", lambda_max=" + std::to_string(est.gram_eigs.max) + ")");
  }
  const Matrix theta_t = est.gram.colPivHouseholderQr().solve(mom.cross);
  est.theta_hat = theta_t.transpose();
  est.residual_norm = (data.y - data.z * theta_t).norm();

  if (theta_true) {
    if (theta_true->rows() != est.theta_hat.rows() || theta_true->cols() != est.theta_hat.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "true parameter has the wrong shape");
    }
    const RowMatrix w = data.y - data.z * theta_true->transpose();
    est.cross = moments(data.z, w).cross;
    EstimateErrors err;
    err.error = est.theta_hat - *theta_true;
    err.theta = spectral_norm(err.error);
    err.a = spectral_norm(err.error.leftCols(n_x));
    err.b = n_u > 0 ? spectral_norm(err.error.rightCols(n_u)) : 0.0;
    est.errors = std::move(err);
  }
  return est;
}

Estimate ols_batch(const TrajectoryBatch& batch, const BatchOptions& options, const LtiSystem* truth) {
  const RegressionData data = options.pool_all_steps ? pooled_data(batch) : last_step_data(batch);
  std::optional<Matrix> theta;
  if (truth) {
    theta = truth->theta();
  }
  return ols_fit(data, batch.n_x, batch.n_u, theta);
}

Estimate ols_single_traj(const SingleTrajectory& traj, SingleMode mode, const LtiSystem* truth) {
  const RegressionData data = single_traj_data(traj, mode);
  const std::size_t nu = mode == SingleMode::Controlled ? traj.n_u : 0;
  std::optional<Matrix> theta;
  if (truth) {
    theta = mode == SingleMode::Controlled ? truth->theta() : truth->a();
  }
  return ols_fit(data, traj.n_x, nu, theta);
}

ScalarEstimate ols_scalar_lastpoint(std::span<const ScalarSample> samples, std::optional<double> a_true) {
  ScalarEstimate est;
  for (const auto& s : samples) {
    est.numerator += s.x * (s.x_next - s.u);
    est.denominator += s.x * s.x;
  }
  if (!(est.denominator > 0.0)) {
    throw Error(ErrorCode::ZeroDenominator, "sum of squared covariates is zero");
  }
  est.a_hat = est.numerator / est.denominator;
  if (a_true) {
    est.error = est.a_hat - *a_true;
  }
  return est;
}

ScalarEstimate ols_scalar_lastpoint(const TrajectoryBatch& batch, std::optional<double> a_true) {
  if (batch.n_x != 1 || batch.n_u > 1) {
    throw Error(ErrorCode::DimensionMismatch, "scalar estimator needs n_x = 1 and n_u <= 1");
  }
  const RegressionData data = last_step_data(batch);
  std::vector<ScalarSample> samples(batch.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    samples[i] = {data.z(r, 0), batch.n_u == 1 ? data.z(r, 1) : 0.0, data.y(r, 0)};
  }
  return ols_scalar_lastpoint(samples, a_true);
}

} // namespace sysid
