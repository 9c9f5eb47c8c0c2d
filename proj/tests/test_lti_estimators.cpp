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

#include <algorithm>
#include <cmath>

#include "sysid/error.hpp"
#include "sysid/estimators.hpp"
#include "sysid/lti.hpp"

using namespace sysid;

namespace {

Matrix di_a() {
  Matrix a(2, 2);
  a << 1, 0.1, 0, 1;
  return a;
}

// Independent oracle: explicit powers, no recursion.
Matrix brute_gramian(const Matrix& a, const Matrix& b, std::size_t horizon) {
  Matrix sum = Matrix::Zero(a.rows(), a.rows());
  Matrix power = Matrix::Identity(a.rows(), a.rows());
  for (std::size_t t = 0; t <= horizon; ++t) {
    sum += power * b * b.transpose() * power.transpose();
    power = power * a;
  }
  return sum;
}

} // namespace

TEST(Gramian, HandValues) {
  EXPECT_DOUBLE_EQ(gramian(Matrix::Zero(1, 1), Matrix::Ones(1, 1), 3)(0, 0), 1.0);
  EXPECT_NEAR(gramian(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), 2)(0, 0), 1.3125, 1e-15);
  Matrix b(2, 1);
  b << 0, 1;
  Matrix expect(2, 2);
  expect << 0.05, 0.3, 0.3, 3.0;
  EXPECT_TRUE(gramian(di_a(), b, 2).isApprox(expect, 1e-14));
}

TEST(Gramian, ConvergesToStationaryValue) {
  EXPECT_NEAR(gramian(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1), 200)(0, 0), 4.0 / 3.0, 1e-10);
}

TEST(Gramian, SymmetricPsdAndMonotone) {
  const Matrix b = Matrix::Identity(2, 2);
  Matrix prev = Matrix::Zero(2, 2);
  for (std::size_t t = 0; t < 20; ++t) {
    const Matrix g = gramian(di_a(), b, t);
    EXPECT_EQ(g, g.transpose());
    EXPECT_TRUE(is_psd(g));
    EXPECT_TRUE(is_psd(g - prev));
    EXPECT_TRUE(g.isApprox(brute_gramian(di_a(), b, t), 1e-12));
    prev = g;
  }
}

TEST(StateCovariance, HandValues) {
  EXPECT_NEAR(state_covariance(LtiSystem::scalar(0.0, 1, 1), 5)(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(state_covariance(LtiSystem::scalar(0.9, 1, 1), 1)(0, 0), 3.62, 1e-14);
  const LtiSystem di = LtiSystem::double_integrator();
  const Matrix expect = brute_gramian(di.a(), di.b(), 2) + 0.01 * brute_gramian(di.a(), Matrix::Identity(2, 2), 2);
  EXPECT_TRUE(state_covariance(di, 2).isApprox(expect, 1e-14));
}

TEST(StateCovariance, CovariateIsShiftedByOne) {
  const LtiSystem sys = LtiSystem::scalar(0.7, 1.0, 0.5);
  EXPECT_EQ(covariate_covariance(sys, 0)(0, 0), 0.0);
  EXPECT_EQ(covariate_covariance(sys, 4), state_covariance(sys, 3));
  EXPECT_NEAR(noise_gramian(Matrix::Constant(1, 1, 0.5), 1.0, 2)(0, 0), 1.25, 1e-15);
  EXPECT_EQ(noise_gramian(Matrix::Constant(1, 1, 0.5), 1.0, 0)(0, 0), 0.0);
}

TEST(LtiSystem, ValidatesShapes) {
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 3), Matrix::Zero(2, 1), 1, 1), Error);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(3, 1), 1, 1), Error);
  EXPECT_THROW(LtiSystem(Matrix::Zero(2, 2), Matrix::Zero(2, 1), -1, 1), Error);
  const LtiSystem rot = LtiSystem::rotation(0.2, 1.0);
  EXPECT_EQ(rot.n_u(), 0u);
  EXPECT_EQ(rot.theta().cols(), 2);
}

TEST(Simulate, NoiselessStaysAtZero) {
  const TrajectoryBatch b = simulate_batch(LtiSystem(di_a(), Matrix::Zero(2, 1), 0, 0), 4, 5, 1);
  for (const auto& r : b.records) {
    EXPECT_EQ(r.states.rows(), 6);
    EXPECT_TRUE(r.states.isZero(0));
  }
  SingleOptions opts;
  opts.autonomous = true;
  const SingleTrajectory s = simulate_single(LtiSystem(di_a(), Matrix::Zero(2, 1), 0, 0), 10, 1, opts);
  EXPECT_TRUE(s.states.isZero(0));
  EXPECT_EQ(s.inputs.cols(), 0);
}

TEST(Simulate, DeterministicAndThreadInvariant) {
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch a = simulate_batch(di, 37, 6, 99, 1);
  const TrajectoryBatch b = simulate_batch(di, 37, 6, 99, 4);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].states, b.records[i].states);
    EXPECT_EQ(a.records[i].inputs, b.records[i].inputs);
  }
  const TrajectoryBatch c = simulate_batch(di, 37, 6, 100, 1);
  EXPECT_NE(a.records[0].states, c.records[0].states);
  EXPECT_EQ(simulate_single(di, 50, 3).states, simulate_single(di, 50, 3).states);
}

TEST(Simulate, ObeysTheRecursion) {
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch b = simulate_batch(di, 3, 8, 5);
  for (const auto& r : b.records) {
    EXPECT_TRUE(r.states.row(0).isZero(0));
    for (Eigen::Index t = 0; t < 8; ++t) {
      const Vector w = r.states.row(t + 1).transpose() - di.a() * r.states.row(t).transpose() -
                       di.b() * r.inputs.row(t).transpose();
      EXPECT_LT(w.norm(), 1.0);  // noise of scale 0.1
    }
  }
}

TEST(Simulate, LastStepVarianceMatchesCovariance) {
  const TrajectoryBatch b = simulate_batch(LtiSystem::scalar(0.0, 1, 1), 100000, 3, 17);
  double s2 = 0.0;
  for (const auto& r : b.records) s2 += r.states(3, 0) * r.states(3, 0);
  EXPECT_NEAR(s2 / 1e5, 2.0, 0.04);
}

TEST(Simulate, RotationStateGrowsLinearly) {
  // E||x_t||^2 = 2 t for a planar rotation with unit noise; averaged over seeds.
  const LtiSystem rot = LtiSystem::rotation(0.3, 1.0);
  double total = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SingleTrajectory s = simulate_single(rot, 10000, seed);
    for (Eigen::Index t = 5000; t <= 10000; t += 50) {
      total += s.states.row(t).squaredNorm() / static_cast<double>(t);
      ++count;
    }
  }
  EXPECT_NEAR(total / count, 2.0, 0.2);
}

TEST(Simulate, SingleTrajectoryShape) {
  const SingleTrajectory s = simulate_single(LtiSystem::double_integrator(), 12, 1);
  EXPECT_EQ(s.horizon(), 12u);
  EXPECT_EQ(s.states.rows(), 13);
  EXPECT_EQ(s.inputs.rows(), 12);
  EXPECT_FALSE(s.autonomous());
  SingleOptions opts;
  opts.x0 = Vector::Ones(2);
  EXPECT_EQ(simulate_single(LtiSystem::double_integrator(), 3, 1, opts).states.row(0), Vector::Ones(2).transpose());
}

// ---------------------------------------------------------------------------
// estimators

TEST(ScalarEstimator, HandRecords) {
  const std::vector<ScalarSample> s{{1, 0, 0.7}, {2, 0, 1.2}};
  const ScalarEstimate e = ols_scalar_lastpoint(s, 0.6);
  EXPECT_NEAR(e.a_hat, 0.62, 1e-15);
  EXPECT_NEAR(e.numerator, 3.1, 1e-15);
  EXPECT_EQ(e.denominator, 5.0);
  EXPECT_NEAR(*e.error, 0.02, 1e-15);
}

TEST(ScalarEstimator, NoiselessRecoveryAndDegenerateData) {
  const TrajectoryBatch b = simulate_batch(LtiSystem::scalar(0.7, 0.0, 1.0), 20, 4, 2);
  EXPECT_NEAR(ols_scalar_lastpoint(b).a_hat, 0.7, 1e-12);
  const std::vector<ScalarSample> zeros{{0, 1, 1}, {0, 2, 2}};
  try {
    ols_scalar_lastpoint(zeros);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDenominator);
  }
}

TEST(BatchEstimator, NoiselessDoubleIntegratorIsExact) {
  const LtiSystem sys(di_a(), (Matrix(2, 1) << 0, 1).finished(), 0.0, 1.0);
  const TrajectoryBatch b = simulate_batch(sys, 10, 6, 4);
  for (bool pooled : {false, true}) {
    const Estimate e = ols_batch(b, {pooled}, &sys);
    EXPECT_TRUE(e.a_hat().isApprox(sys.a(), 1e-10));
    EXPECT_LT((e.b_hat() - sys.b()).norm(), 1e-10);
    EXPECT_LT(e.errors->theta, 1e-10);
    EXPECT_EQ(e.samples, pooled ? 60u : 10u);
  }
}

TEST(BatchEstimator, PermutationInvariant) {
  const LtiSystem di = LtiSystem::double_integrator();
  TrajectoryBatch b = simulate_batch(di, 30, 5, 8);
  const Estimate e1 = ols_batch(b);
  std::reverse(b.records.begin(), b.records.end());
  const Estimate e2 = ols_batch(b);
  EXPECT_TRUE(e1.theta_hat.isApprox(e2.theta_hat, 1e-12));
}

TEST(BatchEstimator, SingularGram) {
  const LtiSystem sys(di_a(), (Matrix(2, 1) << 0, 1).finished(), 0.1, 1.0);
  const TrajectoryBatch b = simulate_batch(sys, 2, 4, 1);  // 2 samples, 3 unknowns
  try {
    ols_batch(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularGram);
  }
}

TEST(BatchEstimator, ResidualAndCrossMoment) {
  const LtiSystem di = LtiSystem::double_integrator();
  const TrajectoryBatch b = simulate_batch(di, 200, 4, 21);
  const RegressionData d = last_step_data(b);
  const Estimate e = ols_fit(d, 2, 1, di.theta());
  const Matrix resid = d.y - d.z * e.theta_hat.transpose();
  EXPECT_NEAR(e.residual_norm, resid.norm(), 1e-12);
  // Normal equations: Z^T (Y - Z theta_hat^T) = 0.
  EXPECT_LT((d.z.transpose() * resid).norm(), 1e-9);
  // theta_hat - theta = (Z^T W)^T (Z^T Z)^{-1}.
  const Matrix err = (e.gram.inverse() * *e.cross).transpose();
  EXPECT_TRUE(err.isApprox(e.errors->error, 1e-8));
}

TEST(SingleEstimator, NoiselessRecoveryWithInitialState) {
  Matrix a(2, 2);
  a << 0.5, 0.2, 0.0, 0.7;
  const LtiSystem sys(a, Matrix::Zero(2, 0), 0.0, 0.0);
  SingleOptions opts;
  opts.autonomous = true;
  opts.x0 = (Vector(2) << 0.0, 1.0).finished();
  const SingleTrajectory t = simulate_single(sys, 10, 1, opts);
  EXPECT_TRUE(ols_single_traj(t, SingleMode::Autonomous, &sys).a_hat().isApprox(a, 1e-10));

  opts.x0 = (Vector(2) << 1.0, 0.0).finished();  // eigenvector: the data spans one direction
  const SingleTrajectory flat = simulate_single(sys, 10, 1, opts);
  try {
    ols_single_traj(flat, SingleMode::Autonomous);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularGram);
  }
}

TEST(SingleEstimator, ConsistentForStableScalar) {
  const LtiSystem sys = LtiSystem::scalar(0.5, 1.0, 0.0);
  int close = 0;
  SingleOptions opts;
  opts.autonomous = true;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SingleTrajectory t = simulate_single(sys, 10000, seed, opts);
    if (std::abs(ols_single_traj(t, SingleMode::Autonomous).a_hat()(0, 0) - 0.5) <= 0.05) ++close;
  }
  EXPECT_GE(close, 190);
}

TEST(RegressionData, Layouts) {
  const TrajectoryBatch b = simulate_batch(LtiSystem::double_integrator(), 5, 3, 1);
  const RegressionData last = last_step_data(b);
  EXPECT_EQ(last.z.rows(), 5);
  EXPECT_EQ(last.z.cols(), 3);
  EXPECT_EQ(last.z.row(2).head(2), b.records[2].states.row(2));
  EXPECT_EQ(last.y.row(2), b.records[2].states.row(3));
  const RegressionData pooled = pooled_data(b);
  EXPECT_EQ(pooled.z.rows(), 15);
  const SingleTrajectory s = simulate_single(LtiSystem::double_integrator(), 7, 1);
  EXPECT_EQ(single_traj_data(s, SingleMode::Controlled).z.rows(), 7);
  EXPECT_EQ(single_traj_data(s, SingleMode::Autonomous).z.cols(), 2);
}
