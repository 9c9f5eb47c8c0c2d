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
#ifndef SYSID_LINALG_HPP
#define SYSID_LINALG_HPP

#include <Eigen/Dense>

namespace sysid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Convergence tolerance of the power iteration behind spectral_norm.
inline constexpr double kPowerIterationTol = 1e-10;

/// Relative eigenvalue threshold below which a Gram matrix is treated as singular.
inline constexpr double kSingularRatio = 1e-12;

/// Relative tolerance of Loewner-order checks (scaled by the trace magnitude).
inline constexpr double kPsdTol = 1e-10;

Matrix symmetrize(const Matrix& m);

/**
 * @brief Largest singular value by power iteration on M^T M.
 *
 * Iterates until the relative change of the estimate drops below
 * kPowerIterationTol. Returns 0 for an empty or zero matrix.
 */
double spectral_norm(const Matrix& m);

struct EigenExtremes {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of the symmetric part of m.
EigenExtremes eigen_extremes(const Matrix& m);

double min_eigenvalue(const Matrix& m);

/// Scale used for PSD tolerances: max(1, sum |diag|).
double trace_scale(const Matrix& m);

/// True when the symmetric part of m has min eigenvalue >= -kPsdTol * trace_scale(m).
bool is_psd(const Matrix& m);

/// log det of a symmetric positive-definite matrix via Cholesky. Throws SingularGram otherwise.
double logdet_spd(const Matrix& m);

/// log det(num * den^{-1}) via the Cholesky factor L of den: logdet(L^{-1} num L^{-T}).
double logdet_ratio(const Matrix& num, const Matrix& den);

/// Spectral radius max |eig(a)|.
double spectral_radius(const Matrix& a);

/// Block-diagonal concatenation.
Matrix blkdiag(const Matrix& a, const Matrix& b);

} // namespace sysid

#endif // SYSID_LINALG_HPP
