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
#include "sysid/lti.hpp"

#include <cmath>
#include <string>

#include "sysid/error.hpp"
#include "sysid/parallel.hpp"
#include "sysid/rng.hpp"

namespace sysid {

namespace {

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " has non-finite entries");
  }
}

// Fills `out` with `count` scaled standard normals from `stream`, starting at counter `offset`.
inline void draw(const rng::Stream& stream, std::uint64_t offset, double scale, double* out, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = scale == 0.0 ? 0.0 : scale * stream.normal(offset + k);
  }
}

} // namespace

LtiSystem::LtiSystem(Matrix a, Matrix b, double sigma_w, double sigma_u)
    : a_(std::move(a)), b_(std::move(b)), sigma_w_(sigma_w), sigma_u_(sigma_u) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "A must be square and non-empty");
  }
  if (b_.rows() != a_.rows()) {
    if (b_.size() == 0) {
      b_.resize(a_.rows(), 0);
    } else {
      throw Error(ErrorCode::DimensionMismatch, "B must have as many rows as A");
    }
  }
  require_finite(a_, "A");
  require_finite(b_, "B");
  if (!(sigma_w_ >= 0.0) || !std::isfinite(sigma_w_)) {
    throw Error(ErrorCode::InvalidArgument, "sigma_w must be finite and nonnegative");
  }
  if (!(sigma_u_ >= 0.0) || !std::isfinite(sigma_u_)) {
    throw Error(ErrorCode::InvalidArgument, "sigma_u must be finite and nonnegative");
  }
}

LtiSystem LtiSystem::scalar(double a, double sigma_w, double sigma_u) {
  return LtiSystem(Matrix::Constant(1, 1, a), Matrix::Ones(1, 1), sigma_w, sigma_u);
}

LtiSystem LtiSystem::double_integrator() {
  Matrix a(2, 2);
  a << 1.0, 0.1, 0.0, 1.0;
  Matrix b(2, 1);
  b << 0.0, 1.0;
  return LtiSystem(a, b, 0.1, 1.0);
}

LtiSystem LtiSystem::rotation(double angle, double sigma_w) {
  Matrix a(2, 2);
  a << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return LtiSystem(a, Matrix(2, 0), sigma_w, 0.0);
}

Matrix LtiSystem::theta() const {
  Matrix out(n_x(), n_x() + n_u());
  out << a_, b_;
  return out;
}

void TrajectoryBatch::validate() const {
  if (records.empty()) {
    throw Error(ErrorCode::InvalidArgument, "batch has no experiments");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (static_cast<std::size_t>(r.states.rows()) != horizon + 1 ||
        static_cast<std::size_t>(r.states.cols()) != n_x ||
        static_cast<std::size_t>(r.inputs.rows()) != horizon + 1 ||
        static_cast<std::size_t>(r.inputs.cols()) != n_u) {
      throw Error(ErrorCode::DimensionMismatch,
                  "experiment " + std::to_string(i) + " does not match batch dimensions");
    }
  }
}

void SingleTrajectory::validate() const {
  if (states.rows() == 0 || static_cast<std::size_t>(states.cols()) != n_x) {
    throw Error(ErrorCode::DimensionMismatch, "trajectory states do not match n_x");
  }
  if (static_cast<std::size_t>(inputs.cols()) != n_u ||
      (n_u > 0 && static_cast<std::size_t>(inputs.rows()) != horizon())) {
    throw Error(ErrorCode::DimensionMismatch, "trajectory inputs do not match n_u and horizon");
  }
}

Matrix gramian(const Matrix& a, const Matrix& b, std::size_t horizon) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "gramian needs square A and B with matching rows");
  }
  const Matrix bbt = b * b.transpose();
  Matrix m = bbt;
  for (std::size_t t = 0; t < horizon; ++t) {
    m = (a * m * a.transpose() + bbt).eval();
  }
  return symmetrize(m);
}

Matrix state_covariance(const LtiSystem& sys, std::size_t horizon) {
  const double su2 = sys.sigma_u() * sys.sigma_u();
  const double sw2 = sys.sigma_w() * sys.sigma_w();
  const Matrix eye = Matrix::Identity(sys.n_x(), sys.n_x());
  return su2 * gramian(sys.a(), sys.b(), horizon) + sw2 * gramian(sys.a(), eye, horizon);
}

Matrix joint_covariance(const LtiSystem& sys, std::size_t horizon) {
  const double su2 = sys.sigma_u() * sys.sigma_u();
  return blkdiag(state_covariance(sys, horizon), su2 * Matrix::Identity(sys.n_u(), sys.n_u()));
}

Matrix covariate_covariance(const LtiSystem& sys, std::size_t t) {
  if (t == 0) {
    return Matrix::Zero(sys.n_x(), sys.n_x());
  }
  return state_covariance(sys, t - 1);
}

Matrix noise_gramian(const Matrix& a, double sigma_w, std::size_t t) {
  if (t == 0) {
    return Matrix::Zero(a.rows(), a.cols());
  }
  return sigma_w * sigma_w * gramian(a, Matrix::Identity(a.rows(), a.cols()), t - 1);
}

TrajectoryBatch simulate_batch(const LtiSystem& sys, std::size_t n_experiments, std::size_t horizon,
                               std::uint64_t seed, unsigned threads) {
  if (n_experiments == 0) {
    throw Error(ErrorCode::InvalidArgument, "simulate_batch needs N >= 1");
  }
  const std::size_t nx = sys.n_x();
  const std::size_t nu = sys.n_u();
  TrajectoryBatch batch;
  batch.n_x = nx;
  batch.n_u = nu;
  batch.horizon = horizon;
  batch.seed = seed;
  batch.records.resize(n_experiments);

  parallel_for(n_experiments, threads, [&](std::size_t i) {
    const rng::Stream input(rng::derive_key(seed, {i, static_cast<std::uint64_t>(rng::Tag::Input)}));
    const rng::Stream noise(rng::derive_key(seed, {i, static_cast<std::uint64_t>(rng::Tag::Process)}));
    ExperimentRecord rec;
    rec.states = RowMatrix::Zero(horizon + 1, nx);
    rec.inputs = RowMatrix::Zero(horizon + 1, nu);
    Vector w(nx);
    for (std::size_t t = 0; t <= horizon; ++t) {
      draw(input, t * nu, sys.sigma_u(), rec.inputs.row(t).data(), nu);
      if (t == horizon) {
        break;
      }
      draw(noise, t * nx, sys.sigma_w(), w.data(), nx);
      rec.states.row(t + 1) = (sys.a() * rec.states.row(t).transpose() +
                               sys.b() * rec.inputs.row(t).transpose() + w).transpose();
    }
    batch.records[i] = std::move(rec);
  });
  return batch;
}

SingleTrajectory simulate_single(const LtiSystem& sys, std::size_t horizon, std::uint64_t seed,
                                 const SingleOptions& options) {
  const std::size_t nx = sys.n_x();
  const std::size_t nu = options.autonomous ? 0 : sys.n_u();
  SingleTrajectory traj;
  traj.n_x = nx;
  traj.n_u = nu;
  traj.seed = seed;
  traj.states = RowMatrix::Zero(horizon + 1, nx);
  traj.inputs = RowMatrix::Zero(horizon, nu);
  if (options.x0) {
    if (static_cast<std::size_t>(options.x0->size()) != nx) {
      throw Error(ErrorCode::DimensionMismatch, "x0 override has the wrong dimension");
    }
    traj.states.row(0) = options.x0->transpose();
  }
  const rng::Stream input(rng::derive_key(seed, {0, static_cast<std::uint64_t>(rng::Tag::Input)}));
  const rng::Stream noise(rng::derive_key(seed, {0, static_cast<std::uint64_t>(rng::Tag::Process)}));
  const Matrix& a = sys.a();
  const Matrix& b = sys.b();
  Vector x = traj.states.row(0).transpose();
  Vector next(nx);
  Vector u(nu);
  Vector w(nx);
  for (std::size_t t = 0; t < horizon; ++t) {
    draw(noise, t * nx, sys.sigma_w(), w.data(), nx);
    next.noalias() = a * x;
    if (nu > 0) {
      draw(input, t * nu, sys.sigma_u(), u.data(), nu);
      traj.inputs.row(t) = u.transpose();
      next.noalias() += b * u;
    }
    next += w;
    traj.states.row(t + 1) = next.transpose();
    x.swap(next);
  }
  return traj;
}

} // namespace sysid
