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
#include "sysid/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sysid/bootstrap.hpp"
#include "sysid/cert_bounds.hpp"
#include "sysid/error.hpp"
#include "sysid/estimators.hpp"
#include "sysid/parallel.hpp"
#include "sysid/rng.hpp"

namespace sysid::mc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t as_count(double grid_value, const char* what) {
  if (!(grid_value >= 1.0) || grid_value != std::floor(grid_value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " grid values must be positive integers");
  }
  return static_cast<std::size_t>(grid_value);
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) {
    return v[lo];
  }
  if (std::isinf(v[hi]) || std::isinf(v[lo])) {
    return v[hi];
  }
  return v[lo] + frac * (v[hi] - v[lo]);
}

Outcome upper(double error, double bound) {
  return {error, bound, error <= bound, true};
}

// Replicates whose bound preconditions fail are reported but not certified.
Outcome upper(double error, const BoundCertificate& cert) {
  return {error, cert.value, error <= cert.value, cert.precondition_ok};
}

} // namespace

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "quantiles of an empty sample");
  }
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.25), quantile_sorted(values, 0.5), quantile_sorted(values, 0.75)};
}

std::uint64_t replicate_seed(std::uint64_t master_seed, const std::string& scenario_id, double grid_value,
                             std::size_t replicate) {
  return rng::derive_key(master_seed, {rng::hash_name(scenario_id), std::bit_cast<std::uint64_t>(grid_value),
                                       static_cast<std::uint64_t>(rng::Tag::Replicate), replicate});
}

std::vector<CoverageReport> coverage_experiment(const Scenario& scenario, std::span<const double> grid,
                                                std::size_t replicates, std::uint64_t master_seed,
                                                unsigned threads) {
  if (grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "coverage grid is empty");
  }
  if (replicates == 0) {
    throw Error(ErrorCode::InvalidArgument, "coverage needs at least one replicate");
  }
  const std::size_t targets = scenario.targets.size();
  std::vector<CoverageReport> reports;
  reports.reserve(grid.size() * targets);

  for (double g : grid) {
    // slots[r * targets + k]
    std::vector<ReplicateRecord> slots(replicates * targets);
    parallel_for(replicates, threads, [&](std::size_t r) {
      const std::uint64_t seed = replicate_seed(master_seed, scenario.id, g, r);
      std::vector<Outcome> outcomes;
      std::string failure;
      try {
        outcomes = scenario.run(g, seed);
        if (outcomes.size() != targets) {
          failure = "scenario returned the wrong number of outcomes";
        }
      } catch (const Error& e) {
        failure = e.what();
      }
      for (std::size_t k = 0; k < targets; ++k) {
        ReplicateRecord& rec = slots[r * targets + k];
        rec.grid_value = g;
        rec.replicate = r;
        if (!failure.empty()) {
          rec.failure = failure;
          rec.error = std::numeric_limits<double>::quiet_NaN();
          rec.bound = std::numeric_limits<double>::quiet_NaN();
          rec.covered = false;
          rec.certified = false;
          continue;
        }
        const Outcome& o = outcomes[k];
        rec.error = o.error;
        rec.bound = o.bound;
        rec.certified = o.certified;
        rec.covered = o.certified && o.covered;
      }
    });

    for (std::size_t k = 0; k < targets; ++k) {
      CoverageReport rep;
      rep.scenario = scenario.id;
      rep.target = scenario.targets[k];
      rep.grid_value = g;
      rep.replicates = replicates;
      rep.delta = scenario.delta;
      std::vector<double> errors;
      std::vector<double> bounds;
      for (std::size_t r = 0; r < replicates; ++r) {
        const ReplicateRecord& rec = slots[r * targets + k];
        rep.per_replicate.push_back(rec);
        if (!rec.failure.empty()) {
          ++rep.failures;
          continue;
        }
        errors.push_back(rec.error);
        if (rec.certified) {
          ++rep.certified;
          bounds.push_back(rec.bound);
        }
        if (rec.covered) {
          ++rep.covered;
        }
      }
      rep.coverage = static_cast<double>(rep.covered) / static_cast<double>(replicates);
      rep.certified_coverage =
          rep.certified == 0 ? 0.0 : static_cast<double>(rep.covered) / static_cast<double>(rep.certified);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rep.error_quantiles = errors.empty() ? Quantiles{nan, nan, nan} : quantiles(errors);
      rep.bound_quantiles = bounds.empty() ? Quantiles{nan, nan, nan} : quantiles(bounds);
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "rate_fit needs at least 3 points");
  }
  const double n = static_cast<double>(points.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [size, err] : points) {
    if (!(size > 0.0) || !(err > 0.0)) {
      throw Error(ErrorCode::NonPositiveValue, "rate_fit needs positive sizes and errors");
    }
    sx += std::log(size);
    sy += std::log(err);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [size, err] : points) {
    const double dx = std::log(size) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate_fit needs at least two distinct sizes");
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [size, err] : points) {
    const double resid = std::log(err) - (fit.intercept + fit.slope * std::log(size));
    rss += resid * resid;
  }
  fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

void attach_rate_slopes(std::vector<CoverageReport>& reports) {
  std::vector<std::string> targets;
  for (const auto& r : reports) {
    if (std::find(targets.begin(), targets.end(), r.target) == targets.end()) {
      targets.push_back(r.target);
    }
  }
  for (const auto& target : targets) {
    std::vector<std::pair<double, double>> points;
    for (const auto& r : reports) {
      if (r.target == target && r.error_quantiles.median > 0.0 && std::isfinite(r.error_quantiles.median)) {
        points.emplace_back(r.grid_value, r.error_quantiles.median);
      }
    }
    if (points.size() < 3) {
      continue;
    }
    const double slope = rate_fit(points).slope;
    for (auto& r : reports) {
      if (r.target == target) {
        r.slope = slope;
      }
    }
  }
}

double mgf_quadrature(MgfKind kind, double lambda) {
  if (!in_mgf_domain(kind, lambda)) {
    throw Error(ErrorCode::DomainExceeded, "lambda outside the MGF domain");
  }
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
  auto integrand = [&](double x) {
    const double exponent = kind == MgfKind::ChiSqCentered ? lambda * (x * x - 1.0) : 0.5 * lambda * lambda * x * x;
    return inv_sqrt_2pi * std::exp(exponent - 0.5 * x * x);
  };
  // Effective Gaussian width of the integrand; tails beyond 40 widths are below exp(-800).
  const double curvature = kind == MgfKind::ChiSqCentered ? 1.0 - 2.0 * lambda : 1.0 - lambda * lambda;
  const double half_width = 40.0 / std::sqrt(curvature);
  double error_estimate = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -half_width, half_width, 20, 1e-14, &error_estimate);
  if (!std::isfinite(value) || error_estimate > 1e-10 * std::max(1.0, std::abs(value))) {
    throw Error(ErrorCode::IntegrationDivergence,
                "quadrature error estimate " + std::to_string(error_estimate) + " exceeds tolerance");
  }
  return value;
}

std::vector<TailPoint> empirical_tail(const std::function<double(std::uint64_t seed)>& sampler,
                                      std::span<const double> t_grid, std::size_t replicates,
                                      std::uint64_t master_seed, unsigned threads) {
  std::vector<double> stats(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    stats[r] = sampler(rng::derive_key(master_seed, {static_cast<std::uint64_t>(rng::Tag::Auxiliary), r}));
  });
  std::vector<TailPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const auto hits = std::count_if(stats.begin(), stats.end(), [t](double s) { return s >= t; });
    out.push_back({t, replicates == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(replicates)});
  }
  return out;
}

double three_sigma_slack(double delta, std::size_t replicates) {
  return delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(replicates));
}

// ---------------------------------------------------------------------------

Scenario scalar_theorem_scenario(const LtiSystem& sys, std::size_t horizon, double delta) {
  require_delta(delta, "scalar_theorem_scenario");
  if (sys.n_x() != 1 || sys.n_u() > 1) {
    throw Error(ErrorCode::DimensionMismatch, "scalar scenario needs a scalar system");
  }
  const double sigma_x = std::sqrt(covariate_covariance(sys, horizon - 1)(0, 0));
  Scenario s;
  s.id = "scalar_theorem";
  s.delta = delta;
  s.targets = {"a"};
  s.run = [sys, horizon, delta, sigma_x](double g, std::uint64_t seed) {
    const std::size_t n = as_count(g, "N");
    const TrajectoryBatch batch = simulate_batch(sys, n, horizon, seed);
    const BoundCertificate bound = scalar_error_bound(sys.sigma_w(), sigma_x, n, delta);
    double err = 0.0;
    if (sys.sigma_w() > 0.0) {
      err = std::abs(*ols_scalar_lastpoint(batch, sys.a()(0, 0)).error);
    }
    return std::vector<Outcome>{upper(err, bound)};
  };
  return s;
}

Scenario matrix_theorem_scenario(const LtiSystem& sys, std::size_t horizon, double delta) {
  require_delta(delta, "matrix_theorem_scenario");
  const double lmin = min_eigenvalue(covariate_covariance(sys, horizon - 1));
  Scenario s;
  s.id = "matrix_theorem";
  s.delta = delta;
  s.targets = {"A", "B"};
  s.run = [sys, horizon, delta, lmin](double g, std::uint64_t seed) {
    const std::size_t n = as_count(g, "N");
    const TrajectoryBatch batch = simulate_batch(sys, n, horizon, seed);
    const Estimate est = ols_batch(batch, {}, &sys);
    const MatrixErrorBounds b = matrix_error_bounds(lmin, sys.sigma_w(), sys.sigma_u(), sys.n_x(), sys.n_u(), n, delta);
    return std::vector<Outcome>{upper(est.errors->a, b.eps_a), upper(est.errors->b, b.eps_b)};
  };
  return s;
}

Scenario ellipsoid_scenario(const LtiSystem& sys, std::size_t horizon, double delta) {
  require_delta(delta, "ellipsoid_scenario");
  Scenario s;
  s.id = "ellipsoid";
  s.delta = delta;
  s.targets = {"containment", "A", "B"};
  s.run = [sys, horizon, delta](double g, std::uint64_t seed) {
    const std::size_t n = as_count(g, "N");
    const TrajectoryBatch batch = simulate_batch(sys, n, horizon, seed);
    const RegressionData data = last_step_data(batch);
    const Estimate est = ols_fit(data, sys.n_x(), sys.n_u(), sys.theta());
    const EllipsoidCertificate cert = confidence_ellipsoid(data.z, sys.n_x(), sys.sigma_w(), delta);
    const Matrix stacked = est.errors->error.transpose();
    const BlockBounds blocks = block_spectral_bounds(cert);
    Outcome contain;
    contain.error = cert.required_scale(stacked);
    contain.bound = cert.scale_c2;
    contain.covered = cert.contains(stacked);
    return std::vector<Outcome>{contain, upper(est.errors->a, blocks.eps_a), upper(est.errors->b, blocks.eps_b)};
  };
  return s;
}

Scenario single_traj_scenario(const LtiSystem& sys, double alpha, double delta, bool use_true_b) {
  require_delta(delta, "single_traj_scenario");
  Scenario s;
  s.id = "single_traj_cert";
  s.delta = delta;
  s.targets = {"theta"};
  s.run = [sys, alpha, delta, use_true_b](double g, std::uint64_t seed) {
    const std::size_t horizon = as_count(g, "T");
    const SingleTrajectory traj = simulate_single(sys, horizon, seed);
    const RegressionData data = single_traj_data(traj, SingleMode::Controlled);
    const Estimate est = ols_fit(data, sys.n_x(), sys.n_u(), sys.theta());
    SingleTrajInputs in;
    in.b = use_true_b ? sys.b() : est.b_hat();
    in.b_source = use_true_b ? "true" : "estimate";
    in.sigma_u = sys.sigma_u();
    in.sigma_w = sys.sigma_w();
    const SingleTrajCertificate cert = single_traj_cert(data.z, in, alpha, delta);
    Outcome o = upper(est.errors->theta, cert.bound.value);
    o.certified = cert.certified;
    return std::vector<Outcome>{o};
  };
  return s;
}

Scenario snm_uniform_scenario(double a, double sigma_w, double regularizer, double delta) {
  require_delta(delta, "snm_uniform_scenario");
  if (!(regularizer > 0.0)) {
    throw Error(ErrorCode::SingularRegularizer, "regularizer must be positive");
  }
  Scenario s;
  s.id = "snm_uniform";
  s.delta = delta;
  s.targets = {"uniform"};
  s.run = [a, sigma_w, regularizer, delta](double g, std::uint64_t seed) {
    const std::size_t horizon = as_count(g, "horizon");
    const rng::Stream noise(rng::derive_key(seed, {0, static_cast<std::uint64_t>(rng::Tag::Process)}));
    const double r2 = sigma_w * sigma_w;
    const double log_inv_delta = std::log(1.0 / delta);
    double x = 0.0;
    double vt = 0.0;
    double st = 0.0;
    double worst = 0.0;  // max_t statistic / radius
    for (std::size_t t = 0; t < horizon; ++t) {
      const double w = sigma_w * noise.normal(t);
      vt += x * x;
      st += x * w;
      const double vbar = regularizer + vt;
      const double statistic = st * st / vbar;
      const double radius = 2.0 * r2 * (0.5 * std::log(vbar / regularizer) + log_inv_delta);
      worst = std::max(worst, statistic / radius);
      x = a * x + w;
    }
    return std::vector<Outcome>{upper(worst, 1.0)};
  };
  return s;
}

Scenario bootstrap_scenario(const LtiSystem& sys, std::size_t horizon, std::size_t trials, double delta) {
  require_delta(delta, "bootstrap_scenario");
  Scenario s;
  s.id = "bootstrap";
  s.delta = delta;
  s.targets = {"A", "B"};
  s.run = [sys, horizon, trials, delta](double g, std::uint64_t seed) {
    const std::size_t n = as_count(g, "N");
    const TrajectoryBatch batch = simulate_batch(sys, n, horizon, seed);
    const Estimate est = ols_batch(batch, {.pool_all_steps = true}, &sys);
    const BootstrapResult boot =
        bootstrap_eps(batch, est.a_hat(), est.b_hat(), sys.sigma_w(), sys.sigma_u(),
                      {.trials = trials, .delta = delta, .seed = rng::mix64(seed), .threads = 1});
    return std::vector<Outcome>{upper(est.errors->a, boot.eps_a), upper(est.errors->b, boot.eps_b)};
  };
  return s;
}

Scenario lwm_scenario(const LtiSystem& sys, double delta) {
  require_delta(delta, "lwm_scenario");
  Scenario s;
  s.id = "lwm";
  s.delta = delta;
  s.targets = {"A"};
  s.run = [sys, delta](double g, std::uint64_t seed) {
    const std::size_t horizon = as_count(g, "T");
    SingleOptions opts;
    opts.autonomous = true;
    const SingleTrajectory traj = simulate_single(sys, horizon, seed, opts);
    const Estimate est = ols_single_traj(traj, SingleMode::Autonomous, &sys);
    const BoundCertificate cert = lwm_system_bound(sys.a(), sys.sigma_w(), horizon, delta);
    return std::vector<Outcome>{upper(est.errors->theta, cert)};
  };
  return s;
}

Scenario cross_term_scenario(std::size_t n, std::size_t m, double delta) {
  require_delta(delta, "cross_term_scenario");
  Scenario s;
  s.id = "cross_term";
  s.delta = delta;
  s.targets = {"norm"};
  s.run = [n, m, delta](double g, std::uint64_t seed) {
    const std::size_t samples = as_count(g, "N");
    const rng::Stream xs(rng::derive_key(seed, {0, static_cast<std::uint64_t>(rng::Tag::Input)}));
    const rng::Stream ws(rng::derive_key(seed, {0, static_cast<std::uint64_t>(rng::Tag::Process)}));
    Matrix sum = Matrix::Zero(n, m);
    Vector x(n);
    Vector w(m);
    for (std::size_t i = 0; i < samples; ++i) {
      for (std::size_t j = 0; j < n; ++j) x(j) = xs.normal(i * n + j);
      for (std::size_t j = 0; j < m; ++j) w(j) = ws.normal(i * m + j);
      sum.noalias() += x * w.transpose();
    }
    return std::vector<Outcome>{upper(spectral_norm(sum), cross_term_norm_bound(1.0, 1.0, samples, n, m, delta))};
  };
  return s;
}

Scenario min_eig_scenario(std::size_t n, double delta) {
  require_delta(delta, "min_eig_scenario");
  Scenario s;
  s.id = "min_eig";
  s.delta = std::min(1.0, 2.0 * delta);
  s.targets = {"lambda_min"};
  s.run = [n, delta](double g, std::uint64_t seed) {
    const std::size_t samples = as_count(g, "N");
    const rng::Stream xs(rng::derive_key(seed, {0, static_cast<std::uint64_t>(rng::Tag::Input)}));
    Matrix sum = Matrix::Zero(n, n);
    Vector x(n);
    for (std::size_t i = 0; i < samples; ++i) {
      for (std::size_t j = 0; j < n; ++j) x(j) = xs.normal(i * n + j);
      sum.noalias() += x * x.transpose();
    }
    const double lmin = min_eigenvalue(sum);
    const BoundCertificate bound = min_eig_lower_bound(1.0, samples, n, delta);
    return std::vector<Outcome>{{lmin, bound.value, lmin >= bound.value, bound.precondition_ok}};
  };
  return s;
}

} // namespace sysid::mc
