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
#ifndef SYSID_CERT_BOUNDS_HPP
#define SYSID_CERT_BOUNDS_HPP

#include <cstddef>
#include <string>

#include "sysid/linalg.hpp"
#include "sysid/theory_bounds.hpp"

// Data-dependent confidence certificates: the confidence ellipsoid for
// independent samples, the per-block spectral-norm bounds it implies, the self-normalized
// martingale radius and the single-trajectory certificate built on it.

namespace sysid {

/**
 * @brief Confidence set E E^T <= C^2 (Z^T Z)^{-1} for the stacked error
 * E = [(A_hat - A)^T; (B_hat - B)^T].
 *
 * The shape is kept as an eigendecomposition of Z^T Z; eigenvalues below
 * kSingularRatio * lambda_max have an infinite inverse.
 */
struct EllipsoidCertificate {
  double scale_c2 = 0.0;
  double delta = 1.0;
  std::size_t n_x = 0;
  std::size_t n_u = 0;
  Matrix gram;           // Z^T Z
  Vector gram_eigvals;   // ascending
  Matrix gram_eigvecs;   // columns
  std::size_t infinite_directions = 0;

  /// (Z^T Z)^{-1}; entries touched by an infinite direction are +-inf.
  Matrix shape() const;

  /// E E^T <= C^2 (Z^T Z)^{-1}, checked as a PSD difference (or on the finite subspace).
  bool contains(const Matrix& error_stacked) const;

  /// Smallest c2 for which contains() holds: ||E^T (Z^T Z)^{1/2}||_2^2.
  double required_scale(const Matrix& error_stacked) const;
};

/// C^2 = sigma_w^2 (sqrt(n_x + n_u) + sqrt(n_x) + sqrt(2 log(1/delta)))^2.
double ellipsoid_scale(double sigma_w, std::size_t n_x, std::size_t n_u, double delta);

/// Throws TooFewSamples when Z has fewer rows than n_x + n_u.
EllipsoidCertificate confidence_ellipsoid(const RowMatrix& z, std::size_t n_x, double sigma_w, double delta);

struct BlockBounds {
  double eps_a = 0.0;
  double eps_b = 0.0;
};

/// eps = C ||Q M Q^T||_2^{1/2} for the A and B row selectors; +inf through infinite directions.
BlockBounds block_spectral_bounds(const EllipsoidCertificate& cert);

/// State of the vector self-normalized process S_t = sum eta_s X_s.
struct SnmState {
  Matrix v;      // regularizer, positive definite
  Matrix v_t;    // sum X_s X_s^T
  Matrix s_t;    // sum X_s eta_s^T (n x k; k = 1 for a scalar noise)
  double r2 = 1.0;

  SnmState(Matrix regularizer, std::size_t noise_dim, double r2);

  Matrix v_bar() const { return v + v_t; }
  void update(const Vector& x, const Vector& eta);

  /// ||V_bar^{-1/2} S_t||_2^2.
  double statistic() const;
};

/**
 * 2 R^2 log(det(V_bar)^{1/2} det(V)^{-1/2} / delta), via log-determinants.
 * Throws SingularRegularizer when V is not positive definite.
 */
double snm_radius(const Matrix& v, const Matrix& v_bar, double r2, double delta);
double snm_radius(const SnmState& state, double delta);

struct SingleTrajCertificate {
  BoundCertificate bound;
  bool certified = false;
  double alpha = 1.0;
  double ordering_margin = 0.0;  // lambda_min(alpha V_T - V)
  double alpha_min = 0.0;        // smallest alpha with V <= alpha V_T
  double lambda_min_vt = 0.0;
  double logdet_vt_v = 0.0;      // log det(V_T V^{-1})
  std::string b_source;          // "true" or "estimate"
};

struct SingleTrajInputs {
  Matrix b;           // input matrix used to build V (n_x x n_u; n_u may be 0)
  double sigma_u = 0.0;
  double sigma_w = 1.0;
  std::string b_source = "estimate";
};

/// V = T blkdiag(B B^T sigma_u^2 + sigma_w^2 I, sigma_u^2 I).
Matrix single_traj_regularizer(const SingleTrajInputs& in, std::size_t horizon);

/**
 * @brief Data-dependent bound on ||Theta_hat - Theta||_2 from one trajectory.
 *
 * sqrt(8 (1 + alpha)) sigma_w sqrt((n_x log(9/delta) + log det(V_T V^{-1}) / 2) / lambda_min(V_T)).
 * Certified only when V <= alpha V_T; otherwise certified is false, the value
 * is +inf and violated_condition is "OrderingViolated". Throws SingularGram
 * when lambda_min(V_T) <= 0.
 */
SingleTrajCertificate single_traj_cert(const RowMatrix& z, const SingleTrajInputs& in, double alpha, double delta);

} // namespace sysid

#endif // SYSID_CERT_BOUNDS_HPP
