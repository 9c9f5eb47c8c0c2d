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
#include "sysid/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sysid/error.hpp"
#include "sysid/estimators.hpp"
#include "sysid/parallel.hpp"
#include "sysid/rng.hpp"

namespace sysid {

double nearest_rank_percentile(std::vector<double> values, double delta) {
  require_delta(delta, "nearest_rank_percentile");
  if (values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "percentile of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  // The small offset keeps e.g. 200 * 0.95 from rounding up to rank 191.
  auto rank = static_cast<std::size_t>(std::ceil(m * (1.0 - delta) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

BootstrapResult bootstrap_eps(const TrajectoryBatch& data, const Matrix& a_hat, const Matrix& b_hat, double sigma_w,
                              double sigma_u, const BootstrapConfig& config) {
  data.validate();
  require_delta(config.delta, "bootstrap_eps");
  if (config.trials == 0) {
    throw Error(ErrorCode::InvalidArgument, "bootstrap needs M >= 1 trials");
  }
  const auto nx = static_cast<Eigen::Index>(data.n_x);
  const auto nu = static_cast<Eigen::Index>(data.n_u);
  if (a_hat.rows() != nx || a_hat.cols() != nx || b_hat.rows() != nx || b_hat.cols() != nu) {
    throw Error(ErrorCode::DimensionMismatch, "fitted (A_hat, B_hat) do not match the data dimensions");
  }
  const std::size_t horizon = data.horizon;

  BootstrapResult result;
  result.trials = config.trials;
  result.delta = config.delta;
  result.seed = config.seed;
  result.samples.resize(config.trials);

  parallel_for(config.trials, config.threads, [&](std::size_t trial) {
    const std::uint64_t trial_seed =
        rng::derive_key(config.seed, {static_cast<std::uint64_t>(rng::Tag::Bootstrap), trial});
    TrajectoryBatch synth;
    synth.n_x = data.n_x;
    synth.n_u = data.n_u;
    synth.horizon = horizon;
    synth.seed = trial_seed;
    synth.records.resize(data.size());
    Vector w(nx);
    Vector x(nx);
    for (std::size_t l = 0; l < data.size(); ++l) {
      const rng::Stream input(rng::derive_key(trial_seed, {l, static_cast<std::uint64_t>(rng::Tag::Input)}));
      const rng::Stream noise(rng::derive_key(trial_seed, {l, static_cast<std::uint64_t>(rng::Tag::Process)}));
      ExperimentRecord rec;
      rec.states = RowMatrix::Zero(static_cast<Eigen::Index>(horizon + 1), nx);
      rec.inputs = RowMatrix::Zero(static_cast<Eigen::Index>(horizon + 1), nu);
      rec.states.row(0) = data.records[l].states.row(0);
      for (std::size_t t = 0; t < horizon; ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        for (Eigen::Index k = 0; k < nu; ++k) {
          rec.inputs(row, k) = sigma_u == 0.0 ? 0.0 : sigma_u * input.normal(t * nu + k);
        }
        for (Eigen::Index k = 0; k < nx; ++k) {
          w(k) = sigma_w == 0.0 ? 0.0 : sigma_w * noise.normal(t * nx + k);
        }
        x.noalias() = a_hat * rec.states.row(row).transpose();
        x.noalias() += b_hat * rec.inputs.row(row).transpose();
        x += w;
        rec.states.row(row + 1) = x.transpose();
      }
      synth.records[l] = std::move(rec);
    }
    BootstrapSample sample;
    try {
      const Estimate refit = ols_batch(synth, {.pool_all_steps = true});
      sample.eps_a = spectral_norm(a_hat - refit.a_hat());
      sample.eps_b = nu > 0 ? spectral_norm(b_hat - refit.b_hat()) : 0.0;
      if (sigma_w == 0.0) {
        // Noiseless rollouts lie exactly on (A_hat, B_hat); what is left is rounding.
        sample.eps_a = 0.0;
        sample.eps_b = 0.0;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularGram) {
        throw;
      }
      sample.eps_a = std::numeric_limits<double>::infinity();
      sample.eps_b = std::numeric_limits<double>::infinity();
    }
    result.samples[trial] = sample;
  });

  std::vector<double> eps_a(config.trials);
  std::vector<double> eps_b(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) {
    eps_a[i] = result.samples[i].eps_a;
    eps_b[i] = result.samples[i].eps_b;
    if (std::isinf(eps_a[i])) {
      ++result.singular_trials;
    }
  }
  result.eps_a = nearest_rank_percentile(std::move(eps_a), config.delta);
  result.eps_b = nearest_rank_percentile(std::move(eps_b), config.delta);
  return result;
}

double estimate_sigma_w(const TrajectoryBatch& data, const Matrix& a_hat, const Matrix& b_hat) {
  const RegressionData pooled = pooled_data(data);
  Matrix theta(a_hat.rows(), a_hat.cols() + b_hat.cols());
  theta << a_hat, b_hat;
  const double rss = (pooled.y - pooled.z * theta.transpose()).squaredNorm();
  const double dof = static_cast<double>(pooled.z.rows() - pooled.z.cols()) * static_cast<double>(data.n_x);
  if (!(dof > 0.0)) {
    throw Error(ErrorCode::TooFewSamples, "not enough transitions to estimate sigma_w");
  }
  return std::sqrt(rss / dof);
}

} // namespace sysid
