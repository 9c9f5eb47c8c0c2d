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
#ifndef SYSID_MONTECARLO_HPP
#define SYSID_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sysid/lti.hpp"
#include "sysid/theory_bounds.hpp"

// Empirical validation harness: coverage experiments, rate fits and the
// numerical oracles that every bound is checked against.

namespace sysid::mc {

struct Quantiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolation quantiles (type 7). Throws InvalidArgument on empty input.
Quantiles quantiles(std::vector<double> values);

/// Outcome of one replicate for one target of a scenario.
struct Outcome {
  double error = 0.0;
  double bound = 0.0;
  bool covered = false;
  bool certified = true;  // false when the bound's own condition was not met
};

struct ReplicateRecord {
  double grid_value = 0.0;
  std::size_t replicate = 0;
  double error = 0.0;
  double bound = 0.0;
  bool covered = false;
  bool certified = true;
  std::string failure;  // non-empty when the replicate threw
};

struct CoverageReport {
  std::string scenario;
  std::string target;
  double grid_value = 0.0;
  std::size_t replicates = 0;
  std::size_t covered = 0;
  std::size_t certified = 0;
  std::size_t failures = 0;
  double coverage = 0.0;            // covered / replicates
  double certified_coverage = 0.0;  // covered / certified
  double delta = 0.0;
  Quantiles error_quantiles;
  Quantiles bound_quantiles;
  std::optional<double> slope;
  std::vector<ReplicateRecord> per_replicate;
};

/**
 * @brief A replicate generator for one bound (or a family sharing the same data).
 *
 * run(grid_value, seed) simulates, estimates and bounds once, returning one
 * Outcome per entry of `targets`.
 */
struct Scenario {
  std::string id;
  double delta = 0.05;
  std::vector<std::string> targets;
  std::function<std::vector<Outcome>(double grid_value, std::uint64_t seed)> run;
};

/// Seed of one replicate: keyed on (master, scenario hash, grid value, replicate).
std::uint64_t replicate_seed(std::uint64_t master_seed, const std::string& scenario_id, double grid_value,
                             std::size_t replicate);

/**
 * @brief Runs `replicates` replicates per grid point and aggregates coverage.
 *
 * Replicate failures (sysid::Error) are recorded, never rethrown. Output is
 * grid-major then target order and does not depend on `threads`.
 */
std::vector<CoverageReport> coverage_experiment(const Scenario& scenario, std::span<const double> grid,
                                                std::size_t replicates, std::uint64_t master_seed,
                                                unsigned threads = 1);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Least-squares slope of log(error) on log(size). Needs >= 3 positive points.
RateFit rate_fit(std::span<const std::pair<double, double>> points);

/// Fills CoverageReport::slope for each target from the median errors across the grid.
void attach_rate_slopes(std::vector<CoverageReport>& reports);

/**
 * @brief MGF by adaptive Gauss-Kronrod quadrature against the standard normal density.
 *
 * ChiSqCentered integrates e^{lambda (x^2 - 1)}; GaussProduct integrates the
 * conditional MGF e^{lambda^2 x^2 / 2}. Throws DomainExceeded outside the domain
 * and IntegrationDivergence when the relative error estimate exceeds 1e-10.
 */
double mgf_quadrature(MgfKind kind, double lambda);

struct TailPoint {
  double t = 0.0;
  double frequency = 0.0;
};

/// Frequency of {statistic >= t} over `replicates` seeded draws of the statistic.
std::vector<TailPoint> empirical_tail(const std::function<double(std::uint64_t seed)>& sampler,
                                      std::span<const double> t_grid, std::size_t replicates,
                                      std::uint64_t master_seed, unsigned threads = 1);

/// delta + 3 sqrt(delta (1 - delta) / replicates): the three-sigma binomial slack.
double three_sigma_slack(double delta, std::size_t replicates);

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

/// Scalar last-step estimator vs scalar_error_bound; grid = N. Target "a".
Scenario scalar_theorem_scenario(const LtiSystem& sys, std::size_t horizon, double delta);

/// Batch last-step OLS vs matrix_error_bounds; grid = N. Targets "A", "B".
Scenario matrix_theorem_scenario(const LtiSystem& sys, std::size_t horizon, double delta);

/// Confidence ellipsoid; grid = N. Targets "containment", "A", "B".
Scenario ellipsoid_scenario(const LtiSystem& sys, std::size_t horizon, double delta);

/// Controlled single trajectory vs single_traj_cert; grid = T. Target "theta".
Scenario single_traj_scenario(const LtiSystem& sys, double alpha, double delta, bool use_true_b = false);

/// Scalar AR(1) x_{t+1} = a x_t + w_t, any-time self-normalized violation; grid = horizon. Target "uniform".
Scenario snm_uniform_scenario(double a, double sigma_w, double regularizer, double delta);

/// Bootstrap percentiles vs pooled-OLS errors; grid = N. Targets "A", "B".
Scenario bootstrap_scenario(const LtiSystem& sys, std::size_t horizon, std::size_t trials, double delta);

/// Autonomous single-trajectory OLS vs lwm_bound (run at delta/3); grid = T. Target "A".
Scenario lwm_scenario(const LtiSystem& sys, double delta);

/// ||sum x_i w_i^T|| for x_i ~ N(0, I_n), w_i ~ N(0, I_m) vs cross_term_norm_bound; grid = N.
Scenario cross_term_scenario(std::size_t n, std::size_t m, double delta);

/// lambda_min(sum x_i x_i^T), x_i ~ N(0, I_n), vs min_eig_lower_bound at 1 - 2 delta; grid = N.
Scenario min_eig_scenario(std::size_t n, double delta);

} // namespace sysid::mc

#endif // SYSID_MONTECARLO_HPP
