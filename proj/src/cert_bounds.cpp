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
#include "sysid/cert_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sysid/error.hpp"
#include "sysid/kernels.hpp"

namespace sysid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Components smaller than this do not count as touching an eigen-direction.
constexpr double kDirectionTol = 1e-12;

Matrix gram_of(const RowMatrix& z) {
  const auto rows = static_cast<std::size_t>(z.rows());
  const auto d = static_cast<std::size_t>(z.cols());
  RowMatrix gram = RowMatrix::Zero(d, d);
  kernels::accumulate_moments({
      .z = {z.data(), rows * d},
      .y = {},
      .rows = rows,
      .d = d,
      .m = 0,
      .gram = {gram.data(), d * d},
      .cross = {},
  });
  return symmetrize(Matrix(gram));
}

// Entries of the inverse, split into finite part and the +-inf overlay.
Matrix inverse_with_infinities(const Vector& eigvals, const Matrix& eigvecs, std::size_t infinite) {
  const Eigen::Index n = eigvals.size();
  const auto inf = static_cast<Eigen::Index>(infinite);
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index k = inf; k < n; ++k) {
    out += eigvecs.col(k) * eigvecs.col(k).transpose() / eigvals(k);
  }
  for (Eigen::Index k = 0; k < inf; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double c = eigvecs(i, k) * eigvecs(j, k);
        if (std::abs(c) > kDirectionTol) {
          out(i, j) = c > 0.0 ? kInf : -kInf;
        }
      }
    }
  }
  return out;
}

} // namespace

double ellipsoid_scale(double sigma_w, std::size_t n_x, std::size_t n_u, double delta) {
  require_delta(delta, "ellipsoid_scale");
  const double root = std::sqrt(static_cast<double>(n_x + n_u)) + std::sqrt(static_cast<double>(n_x)) +
                      std::sqrt(2.0 * std::log(1.0 / delta));
  return sigma_w * sigma_w * root * root;
}

EllipsoidCertificate confidence_ellipsoid(const RowMatrix& z, std::size_t n_x, double sigma_w, double delta) {
  const auto n = static_cast<std::size_t>(z.cols());
  if (n < n_x) {
    throw Error(ErrorCode::DimensionMismatch, "covariate width is smaller than n_x");
  }
  if (static_cast<std::size_t>(z.rows()) < n) {
    throw Error(ErrorCode::TooFewSamples, "confidence ellipsoid needs N >= n_x + n_u samples");
  }
  EllipsoidCertificate cert;
  cert.n_x = n_x;
  cert.n_u = n - n_x;
  cert.delta = delta;
  cert.scale_c2 = ellipsoid_scale(sigma_w, n_x, cert.n_u, delta);
  cert.gram = gram_of(z);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cert.gram);
  cert.gram_eigvals = solver.eigenvalues();
  cert.gram_eigvecs = solver.eigenvectors();
  const double top = cert.gram_eigvals.size() > 0 ? cert.gram_eigvals.maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < cert.gram_eigvals.size(); ++k) {
    if (!(top > 0.0) || cert.gram_eigvals(k) < kSingularRatio * top) {
      ++cert.infinite_directions;
    }
  }
  return cert;
}

Matrix EllipsoidCertificate::shape() const {
  return inverse_with_infinities(gram_eigvals, gram_eigvecs, infinite_directions);
}

double EllipsoidCertificate::required_scale(const Matrix& error_stacked) const {
  const Eigen::Index n = gram_eigvals.size();
  Matrix root = Matrix::Zero(n, n);
  for (Eigen::Index k = static_cast<Eigen::Index>(infinite_directions); k < n; ++k) {
    root += std::sqrt(std::max(0.0, gram_eigvals(k))) * gram_eigvecs.col(k) * gram_eigvecs.col(k).transpose();
  }
  const double norm = spectral_norm(error_stacked.transpose() * root);
  return norm * norm;
}

bool EllipsoidCertificate::contains(const Matrix& error_stacked) const {
  const Eigen::Index n = gram_eigvals.size();
  if (error_stacked.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "error matrix must have n_x + n_u rows");
  }
  const auto inf = static_cast<Eigen::Index>(infinite_directions);
  const Matrix outer = error_stacked * error_stacked.transpose();
  if (inf == 0) {
    const Matrix diff = symmetrize(scale_c2 * shape() - outer);
    return min_eigenvalue(diff) >= -kPsdTol * trace_scale(diff);
  }
  if (inf == n) {
    return true;
  }
  const Matrix basis = gram_eigvecs.rightCols(n - inf);
  const Vector inv = gram_eigvals.tail(n - inf).cwiseInverse();
  const Matrix diff = symmetrize(scale_c2 * Matrix(inv.asDiagonal()) - basis.transpose() * outer * basis);
  return min_eigenvalue(diff) >= -kPsdTol * trace_scale(diff);
}

BlockBounds block_spectral_bounds(const EllipsoidCertificate& cert) {
  const auto nx = static_cast<Eigen::Index>(cert.n_x);
  const auto nu = static_cast<Eigen::Index>(cert.n_u);
  const auto inf = static_cast<Eigen::Index>(cert.infinite_directions);
  auto touches_infinite = [&](Eigen::Index start, Eigen::Index len) {
    for (Eigen::Index k = 0; k < inf; ++k) {
      if (cert.gram_eigvecs.col(k).segment(start, len).cwiseAbs().maxCoeff() > kDirectionTol) {
        return true;
      }
    }
    return false;
  };
  const Eigen::Index n = cert.gram_eigvals.size();
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = inf; k < n; ++k) {
    m += cert.gram_eigvecs.col(k) * cert.gram_eigvecs.col(k).transpose() / cert.gram_eigvals(k);
  }
  const double c = std::sqrt(cert.scale_c2);
  BlockBounds out;
  out.eps_a = touches_infinite(0, nx) ? kInf : c * std::sqrt(std::max(0.0, eigen_extremes(m.topLeftCorner(nx, nx)).max));
  if (nu == 0) {
    out.eps_b = 0.0;
  } else {
    out.eps_b = touches_infinite(nx, nu)
                    ? kInf
                    : c * std::sqrt(std::max(0.0, eigen_extremes(m.bottomRightCorner(nu, nu)).max));
  }
  return out;
}

SnmState::SnmState(Matrix regularizer, std::size_t noise_dim, double r2_)
    : v(std::move(regularizer)), r2(r2_) {
  if (v.rows() != v.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "regularizer must be square");
  }
  v_t = Matrix::Zero(v.rows(), v.cols());
  s_t = Matrix::Zero(v.rows(), static_cast<Eigen::Index>(noise_dim));
}

void SnmState::update(const Vector& x, const Vector& eta) {
  v_t.noalias() += x * x.transpose();
  s_t.noalias() += x * eta.transpose();
}

double SnmState::statistic() const {
  Eigen::LLT<Matrix> llt(symmetrize(v_bar()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularRegularizer, "V_bar is not positive definite");
  }
  const Matrix whitened = llt.matrixL().solve(s_t);
  const double norm = spectral_norm(whitened);
  return norm * norm;
}

double snm_radius(const Matrix& v, const Matrix& v_bar, double r2, double delta) {
  require_delta(delta, "snm_radius");
  if (!(min_eigenvalue(v) > 0.0)) {
    throw Error(ErrorCode::SingularRegularizer, "regularizer V must be positive definite");
  }
  const double half_logdet = 0.5 * logdet_ratio(v_bar, v);
  return 2.0 * r2 * (half_logdet + std::log(1.0 / delta));
}

double snm_radius(const SnmState& state, double delta) {
  return snm_radius(state.v, state.v_bar(), state.r2, delta);
}

Matrix single_traj_regularizer(const SingleTrajInputs& in, std::size_t horizon) {
  const Eigen::Index nx = in.b.rows();
  const Eigen::Index nu = in.b.cols();
  const double su2 = in.sigma_u * in.sigma_u;
  const double sw2 = in.sigma_w * in.sigma_w;
  const Matrix state_block = su2 * in.b * in.b.transpose() + sw2 * Matrix::Identity(nx, nx);
  return static_cast<double>(horizon) * blkdiag(state_block, su2 * Matrix::Identity(nu, nu));
}

SingleTrajCertificate single_traj_cert(const RowMatrix& z, const SingleTrajInputs& in, double alpha, double delta) {
  require_delta(delta, "single_traj_cert");
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  }
  const Eigen::Index nx = in.b.rows();
  if (z.cols() != nx + in.b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "covariates do not match [x; u] dimensions of B");
  }
  const auto horizon = static_cast<std::size_t>(z.rows());
  const Matrix v_t = gram_of(z);
  const Matrix v = single_traj_regularizer(in, horizon);

  SingleTrajCertificate cert;
  cert.alpha = alpha;
  cert.b_source = in.b_source;
  cert.bound.delta = delta;
  cert.bound.source = "single_traj_cert";
  cert.lambda_min_vt = min_eigenvalue(v_t);
  if (!(cert.lambda_min_vt > 0.0)) {
    throw Error(ErrorCode::SingularGram, "empirical Gram V_T is singular");
  }
  if (!(min_eigenvalue(v) > 0.0)) {
    throw Error(ErrorCode::SingularRegularizer, "V is not positive definite (sigma_w = 0 or sigma_u = 0?)");
  }
  cert.logdet_vt_v = logdet_ratio(v_t, v);
  cert.ordering_margin = min_eigenvalue(symmetrize(alpha * v_t - v));
  // V <= alpha V_T  iff  alpha >= lambda_max(V_T^{-1/2} V V_T^{-1/2}) = 1 / lambda_min(V^{-1/2} V_T V^{-1/2}).
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gen(v_t, v, Eigen::EigenvaluesOnly);
  cert.alpha_min = 1.0 / gen.eigenvalues().minCoeff();
  cert.certified = cert.ordering_margin >= -kPsdTol * trace_scale(v);

  const double numer = static_cast<double>(nx) * std::log(9.0 / delta) + 0.5 * cert.logdet_vt_v;
  const double value = std::sqrt(8.0 * (1.0 + alpha)) * in.sigma_w * std::sqrt(std::max(0.0, numer) / cert.lambda_min_vt);
  if (cert.certified) {
    cert.bound.value = value;
  } else {
    cert.bound.value = kInf;
    cert.bound.precondition_ok = false;
    cert.bound.violated_condition = "OrderingViolated: V <= alpha V_T fails";
  }
  return cert;
}

} // namespace sysid
