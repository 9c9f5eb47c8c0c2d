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
#include <gtest/gtest.h>

#include <cmath>

#include "sysid/bootstrap.hpp"
#include "sysid/error.hpp"
#include "sysid/estimators.hpp"
#include "sysid/montecarlo.hpp"
#include "sysid/rng.hpp"

using namespace sysid;

namespace {

BootstrapConfig config(std::size_t trials, double delta, std::uint64_t seed, unsigned threads = 1) {
  BootstrapConfig c;
  c.trials = trials;
  c.delta = delta;
  c.seed = seed;
  c.threads = threads;
  return c;
}

} // namespace

// ---------------------------------------------------------------------------
// bootstrap

TEST(Percentile, NearestRank) {
  std::vector<double> v;
  for (int i = 1; i <= 200; ++i) v.push_back(i);
  EXPECT_EQ(nearest_rank_percentile(v, 0.05), 190.0);
  EXPECT_EQ(nearest_rank_percentile(v, 1.0), 1.0);
  EXPECT_EQ(nearest_rank_percentile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_EQ(nearest_rank_percentile({5.0}, 0.01), 5.0);
  EXPECT_THROW(nearest_rank_percentile({}, 0.1), Error);
}

TEST(Percentile, MonotoneInDelta) {
  std::vector<double> v;
  const rng::Stream s(4);
  for (int i = 0; i < 97; ++i) v.push_back(s.normal(static_cast<std::uint64_t>(i)));
  double prev = std::numeric_limits<double>::infinity();
  for (double d : {0.01, 0.02, 0.05, 0.1, 0.3, 0.7, 1.0}) {
    const double p = nearest_rank_percentile(v, d);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(Bootstrap, NoiselessGivesZero) {
  const LtiSystem sys(LtiSystem::double_integrator().a(), LtiSystem::double_integrator().b(), 0.0, 1.0);
  const TrajectoryBatch b = simulate_batch(sys, 20, 6, 3);
  const Estimate e = ols_batch(b, {true});
  const BootstrapResult r = bootstrap_eps(b, e.a_hat(), e.b_hat(), 0.0, 1.0, config(50, 0.05, 1));
  EXPECT_EQ(r.samples.size(), 50u);
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.eps_a, 0.0);
    EXPECT_EQ(s.eps_b, 0.0);
  }
  EXPECT_EQ(r.eps_a, 0.0);
  EXPECT_EQ(r.eps_b, 0.0);
}

TEST(Bootstrap, DeterministicAndThreadInvariant) {
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch b = simulate_batch(di, 30, 6, 5);
  const Estimate e = ols_batch(b, {true});
  const BootstrapResult r1 = bootstrap_eps(b, e.a_hat(), e.b_hat(), 0.1, 1.0, config(200, 0.05, 77, 1));
  const BootstrapResult r2 = bootstrap_eps(b, e.a_hat(), e.b_hat(), 0.1, 1.0, config(200, 0.05, 77, 3));
  ASSERT_EQ(r1.samples.size(), r2.samples.size());
  for (std::size_t i = 0; i < r1.samples.size(); ++i) {
    EXPECT_EQ(r1.samples[i].eps_a, r2.samples[i].eps_a);
    EXPECT_EQ(r1.samples[i].eps_b, r2.samples[i].eps_b);
  }
  EXPECT_EQ(r1.eps_a, r2.eps_a);
  EXPECT_GT(r1.eps_a, 0.0);
  EXPECT_GE(r1.eps_a, r1.samples[0].eps_a * 0);  // nonnegative

  std::vector<double> a;
  for (const auto& s : r1.samples) a.push_back(s.eps_a);
  EXPECT_EQ(r1.eps_a, nearest_rank_percentile(a, 0.05));

  const BootstrapResult loose = bootstrap_eps(b, e.a_hat(), e.b_hat(), 0.1, 1.0, config(200, 0.3, 77));
  EXPECT_LE(loose.eps_a, r1.eps_a);
  EXPECT_LE(loose.eps_b, r1.eps_b);
}

TEST(Bootstrap, SingularRefitIsRecordedAsInfinite) {
  // Two rollouts of one step cannot identify three parameters.
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch big = simulate_batch(di, 40, 6, 5);
  const Estimate e = ols_batch(big, {true});
  TrajectoryBatch tiny = simulate_batch(di, 2, 1, 5);
  const BootstrapResult r = bootstrap_eps(tiny, e.a_hat(), e.b_hat(), 0.1, 1.0, config(10, 0.1, 1));
  EXPECT_EQ(r.singular_trials, 10u);
  EXPECT_EQ(r.eps_a, std::numeric_limits<double>::infinity());
}

TEST(Bootstrap, SigmaEstimate) {
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch b = simulate_batch(di, 400, 6, 9);
  const Estimate e = ols_batch(b, {true});
  EXPECT_NEAR(estimate_sigma_w(b, e.a_hat(), e.b_hat()), 0.1, 0.01);
}

// ---------------------------------------------------------------------------
// montecarlo harness

TEST(Quantiles, Type7) {
  const mc::Quantiles q = mc::quantiles({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(q.q1, 1.75);
  EXPECT_DOUBLE_EQ(q.median, 2.5);
  EXPECT_DOUBLE_EQ(q.q3, 3.25);
  const mc::Quantiles one = mc::quantiles({7});
  EXPECT_EQ(one.q1, 7);
  EXPECT_EQ(one.q3, 7);
  EXPECT_THROW(mc::quantiles({}), Error);
}

TEST(RateFit, ExactPowerLaws) {
  std::vector<std::pair<double, double>> half, full;
  for (double n : {64.0, 256.0, 1024.0, 4096.0}) {
    half.emplace_back(n, 3.0 / std::sqrt(n));
    full.emplace_back(n, 2.0 / n);
  }
  EXPECT_NEAR(mc::rate_fit(half).slope, -0.5, 1e-12);
  EXPECT_NEAR(mc::rate_fit(half).intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(mc::rate_fit(half).slope_stderr, 0.0, 1e-12);
  EXPECT_NEAR(mc::rate_fit(full).slope, -1.0, 1e-12);
  const std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
  EXPECT_THROW(mc::rate_fit(two), Error);
}

TEST(MgfQuadrature, AgreesWithClosedForms) {
  EXPECT_NEAR(mc::mgf_quadrature(MgfKind::ChiSqCentered, 0.0), 1.0, 1e-10);
  EXPECT_NEAR(mc::mgf_quadrature(MgfKind::GaussProduct, 0.0), 1.0, 1e-10);
  EXPECT_NEAR(mc::mgf_quadrature(MgfKind::ChiSqCentered, 0.2), mgf_closed_form(MgfKind::ChiSqCentered, 0.2), 1e-8);
  EXPECT_NEAR(mc::mgf_quadrature(MgfKind::GaussProduct, 0.9), 2.2941573, 1e-7);
  EXPECT_THROW(mc::mgf_quadrature(MgfKind::ChiSqCentered, 0.5), Error);
  for (double l : open_grid(-0.45, 0.45, 50)) {
    EXPECT_NEAR(mc::mgf_quadrature(MgfKind::ChiSqCentered, l), mgf_closed_form(MgfKind::ChiSqCentered, l), 1e-8);
  }
}

TEST(EmpiricalTail, GaussianMeanAgainstHoeffding) {
  auto mean_of_100 = [](std::uint64_t seed) {
    const rng::Stream s(seed);
    double sum = 0;
    for (std::uint64_t i = 0; i < 100; ++i) sum += s.normal(i);
    return sum / 100.0;
  };
  const double t = hoeffding_radius(1.0, 100, 0.05, Sides::One);
  const std::vector<double> grid{-1.0, t};
  const auto tail = mc::empirical_tail(mean_of_100, grid, 2000, 11, 2);
  EXPECT_EQ(tail[0].frequency, 1.0);
  EXPECT_LE(tail[1].frequency, mc::three_sigma_slack(0.05, 2000));
}

TEST(EmpiricalTail, ScalarCrossTerm) {
  auto statistic = [](std::uint64_t seed) {
    const rng::Stream s(seed);
    double sum = 0;
    for (std::uint64_t i = 0; i < 100; ++i) sum += s.normal(2 * i) * s.normal(2 * i + 1);
    return std::abs(sum);
  };
  const double t = scalar_cross_upper_bound(1.0, 1.0, 100, 0.1).value;
  const auto tail = mc::empirical_tail(statistic, std::vector<double>{t}, 2000, 12);
  EXPECT_LE(tail[0].frequency, 0.1);
}

TEST(Coverage, DeterministicAcrossThreadCounts) {
  const mc::Scenario s = mc::matrix_theorem_scenario(LtiSystem::double_integrator(), 6, 0.05);
  const std::vector<double> grid{50, 100};
  const auto r1 = mc::coverage_experiment(s, grid, 40, 5, 1);
  const auto r4 = mc::coverage_experiment(s, grid, 40, 5, 4);
  ASSERT_EQ(r1.size(), 4u);  // 2 grid points x 2 targets
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].target, r4[i].target);
    EXPECT_EQ(r1[i].covered, r4[i].covered);
    for (std::size_t k = 0; k < r1[i].per_replicate.size(); ++k) {
      EXPECT_EQ(r1[i].per_replicate[k].error, r4[i].per_replicate[k].error);
    }
  }
  EXPECT_EQ(r1[0].target, "A");
  EXPECT_EQ(r1[1].target, "B");
  EXPECT_EQ(r1[2].grid_value, 100.0);
}

TEST(Coverage, NoiselessIsFullyCovered) {
  const mc::Scenario s = mc::scalar_theorem_scenario(LtiSystem::scalar(0.8, 0.0, 1.0), 3, 0.1);
  const auto r = mc::coverage_experiment(s, std::vector<double>{200}, 50, 1);
  EXPECT_EQ(r[0].coverage, 1.0);
  EXPECT_EQ(r[0].error_quantiles.q3, 0.0);
}

TEST(Coverage, FailuresAreRecordedNotThrown) {
  // Two rollouts cannot identify the double integrator: every replicate fails.
  const mc::Scenario s = mc::matrix_theorem_scenario(LtiSystem::double_integrator(), 6, 0.05);
  const auto r = mc::coverage_experiment(s, std::vector<double>{2}, 5, 1);
  EXPECT_EQ(r[0].failures, 5u);
  EXPECT_EQ(r[0].coverage, 0.0);
  EXPECT_NE(r[0].per_replicate[0].failure.find("SingularGram"), std::string::npos);
  EXPECT_THROW(mc::coverage_experiment(s, std::vector<double>{}, 5, 1), Error);
}

TEST(Coverage, ReplicateSeedsAreIsolated) {
  EXPECT_NE(mc::replicate_seed(1, "a", 10, 0), mc::replicate_seed(1, "b", 10, 0));
  EXPECT_NE(mc::replicate_seed(1, "a", 10, 0), mc::replicate_seed(1, "a", 20, 0));
  EXPECT_NE(mc::replicate_seed(1, "a", 10, 0), mc::replicate_seed(1, "a", 10, 1));
  EXPECT_EQ(mc::replicate_seed(1, "a", 10, 3), mc::replicate_seed(1, "a", 10, 3));
}

TEST(Coverage, SlopesAttached) {
  const mc::Scenario s = mc::cross_term_scenario(2, 2, 0.05);
  auto r = mc::coverage_experiment(s, std::vector<double>{100, 400, 1600}, 30, 2);
  mc::attach_rate_slopes(r);
  ASSERT_TRUE(r[0].slope.has_value());
  EXPECT_NEAR(*r[0].slope, 0.5, 0.2);  // ||sum x w^T|| grows like sqrt(N)
  for (const auto& rep : r) EXPECT_EQ(rep.coverage, 1.0);
}

TEST(Coverage, MinEigReportsDoubledDelta) {
  const mc::Scenario s = mc::min_eig_scenario(2, 0.05);
  EXPECT_DOUBLE_EQ(s.delta, 0.1);
  const auto r = mc::coverage_experiment(s, std::vector<double>{1000}, 50, 3);
  EXPECT_EQ(r[0].certified, 50u);
  EXPECT_GE(r[0].coverage, 0.9);
}
