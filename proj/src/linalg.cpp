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
#include "sysid/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "sysid/error.hpp"

namespace sysid {

Matrix symmetrize(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  const Matrix gram = m.transpose() * m;
  const Eigen::Index n = gram.rows();
  // Deterministic start with no symmetry that could be orthogonal to the top vector.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = 1.0 + 0.1 * static_cast<double>(i) / static_cast<double>(n);
  }
  v.normalize();
  double estimate = 0.0;
  constexpr int kMaxIter = 100000;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      // v landed in the null space; that only happens for the zero matrix
      // or a start vector orthogonal to every nonzero direction.
      if (estimate == 0.0 && gram.norm() == 0.0) {
        return 0.0;
      }
      v = Vector::Unit(n, iter % n);
      continue;
    }
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - estimate) <= kPowerIterationTol * std::abs(next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  // Rayleigh quotient of the final iterate.
  estimate = std::max(estimate, v.dot(gram * v));
  return std::sqrt(std::max(estimate, 0.0));
}

EigenExtremes eigen_extremes(const Matrix& m) {
  if (m.size() == 0) {
    return {};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

double min_eigenvalue(const Matrix& m) {
  return eigen_extremes(m).min;
}

double trace_scale(const Matrix& m) {
  return std::max(1.0, m.diagonal().cwiseAbs().sum());
}

bool is_psd(const Matrix& m) {
  return min_eigenvalue(m) >= -kPsdTol * trace_scale(m);
}

double logdet_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularGram, "log det requires a positive-definite matrix");
  }
  const Matrix& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    sum += std::log(l(i, i));
  }
  return 2.0 * sum;
}

double logdet_ratio(const Matrix& num, const Matrix& den) {
  if (num.rows() != den.rows() || num.cols() != den.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "logdet_ratio operands differ in shape");
  }
  Eigen::LLT<Matrix> llt(symmetrize(den));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularGram, "logdet_ratio denominator is not positive definite");
  }
  const auto l = llt.matrixL();
  Matrix whitened = l.solve(symmetrize(num));
  whitened = l.solve(whitened.transpose()).eval();
  return logdet_spd(whitened);
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::EigenSolver<Matrix> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix blkdiag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

} // namespace sysid
