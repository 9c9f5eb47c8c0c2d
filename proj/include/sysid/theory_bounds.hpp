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
#ifndef SYSID_THEORY_BOUNDS_HPP
#define SYSID_THEORY_BOUNDS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sysid/linalg.hpp"

// A priori error bounds and the tail-bound calculus behind them.
// All logarithms are natural.

namespace sysid {

/**
 * @brief A computed high-probability bound.
 *
 * Preconditions never abort the computation: when a sample-size or domain
 * requirement fails, precondition_ok is false and violated_condition names it.
 */
struct BoundCertificate {
  double value = 0.0;
  double delta = 1.0;
  std::string source;
  bool precondition_ok = true;
  std::string violated_condition;
};

// ---------------------------------------------------------------------------
// Tail parameters
// ---------------------------------------------------------------------------

enum class TailKind { SubGaussian, SubExponential };

struct TailParams {
  TailKind kind = TailKind::SubGaussian;
  double sigma2 = 1.0;  // variance proxy (sub-Gaussian)
  double nu2 = 1.0;     // (nu^2, alpha) pair (sub-exponential)
  double alpha = 0.0;

  static TailParams sub_gaussian(double sigma2);
  static TailParams sub_exponential(double nu2, double alpha);

  /// Effective nu^2: sigma2 for sub-Gaussian, nu2 otherwise.
  double variance_proxy() const noexcept { return kind == TailKind::SubGaussian ? sigma2 : nu2; }
};

/// Sum of independent variables: variance proxies add, alpha takes the max.
TailParams operator+(const TailParams& lhs, const TailParams& rhs);

/// Parameter of a variable bounded in [lo, hi]: (hi - lo)^2 / 4.
double bounded_sigma2(double lo, double hi);

// ---------------------------------------------------------------------------
// Concentration inequalities
// ---------------------------------------------------------------------------

enum class Sides { One, Two };

/**
 * One-sided: sqrt(2 sigma2 log(1/delta) / N). Two-sided: the same radius
 * evaluated at delta/2, so the returned radius holds with probability 1 - delta.
 */
double hoeffding_radius(double sigma2, std::size_t n, double delta, Sides sides);

/// exp(-2 N t^2 / (hi - lo)^2) for i.i.d. variables bounded in [lo, hi].
double hoeffding_bounded_tail(std::size_t n, double t, double lo, double hi);

/// Two-sided radius for an empirical probability: sqrt(log(2/delta) / (2N)).
double probability_estimation_radius(std::size_t n, double delta);

/// exp(-t^2 / (2 sigma2)).
double gaussian_tail(double t, double sigma2);

/// exp(-t^2/(2 nu2)) for t <= nu2/alpha, else exp(-t/(2 alpha)).
double subexp_tail(double nu2, double alpha, double t);

/**
 * @brief Chernoff bound exp(inf_{lambda in [0, b]} [log_mgf(lambda) - lambda t]).
 *
 * Dense grid then golden-section refinement around the best grid point. The
 * result never exceeds the objective at any probed lambda and is capped at 1.
 */
double chernoff_numeric(const std::function<double(double)>& log_mgf, double t, double b);

// ---------------------------------------------------------------------------
// Closed-form MGFs for X^2 - 1 and XW, X, W iid N(0, 1)
// ---------------------------------------------------------------------------

enum class MgfKind { ChiSqCentered, GaussProduct };

/**
 * ChiSqCentered: E e^{lambda (X^2 - 1)} = e^{-lambda} (1 - 2 lambda)^{-1/2}, lambda < 1/2.
 * GaussProduct:  E e^{lambda X W} = (1 - lambda^2)^{-1/2}, |lambda| < 1.
 *
 * The printed forms e^{-lambda}/(1 - 2 lambda) and 1/sqrt(pi (1 - lambda^2))
 * do not equal 1 at lambda = 0; these are the forms that do, and they agree
 * with quadrature (see montecarlo::mgf_quadrature).
 */
double mgf_closed_form(MgfKind kind, double lambda);
double log_mgf_closed_form(MgfKind kind, double lambda);

/// True when lambda is strictly inside the MGF domain.
bool in_mgf_domain(MgfKind kind, double lambda);

struct DominationResult {
  bool pass = false;
  double worst_slack = 0.0;   // min over grid of exp(nu2 lambda^2 / 2) - MGF(lambda)
  double worst_lambda = 0.0;
};

/// Checks MGF(lambda) <= exp(nu2 lambda^2 / 2) on every grid point.
DominationResult subexp_domination_check(MgfKind kind, double nu2, double alpha, std::span<const double> grid);

/// `points` equally spaced values strictly inside (-limit, limit).
std::vector<double> open_grid(double lo, double hi, std::size_t points);

// ---------------------------------------------------------------------------
// Independent-experiment bounds
// ---------------------------------------------------------------------------

/// |e_N| <= 4 (sigma_w / sigma_x) sqrt(log(4/delta) / N); needs N >= 32 log(2/delta).
BoundCertificate scalar_error_bound(double sigma_w, double sigma_x, std::size_t n, double delta);

/// Lower bound sigma_x^2 N / 2 on sum x_T^2; needs N >= 32 log(1/delta).
BoundCertificate scalar_sum_squares_lower_bound(double sigma_x, std::size_t n, double delta);

/// |sum x_T w_T| <= 2 sigma_x sigma_w sqrt(N log(2/delta)); needs N >= log(2/delta) / 2.
BoundCertificate scalar_cross_upper_bound(double sigma_x, double sigma_w, std::size_t n, double delta);

/// ||sum x_i w_i^T||_2 <= 4 ||Sx||^{1/2} ||Sw||^{1/2} sqrt(N (n+m) log(9/delta)).
BoundCertificate cross_term_norm_bound(double norm_sigma_x, double norm_sigma_w, std::size_t n_samples,
                                       std::size_t n, std::size_t m, double delta);

/// lambda_min(sum x_i x_i^T) >= lambda_min(Sx) N / 2 with probability 1 - 2 delta.
BoundCertificate min_eig_lower_bound(double lambda_min_sigma, std::size_t n_samples, std::size_t n,
                                     double delta);

struct MatrixErrorBounds {
  BoundCertificate eps_a;
  BoundCertificate eps_b;
};

/**
 * @brief Spectral-norm bounds on A_hat - A and B_hat - B.
 *
 * eps_B needs sigma_u > 0; with sigma_u = 0 it is +inf with violated_condition
 * "ZeroSigmaU".
 */
MatrixErrorBounds matrix_error_bounds(double lambda_min_sigma_x, double sigma_w, double sigma_u,
                                      std::size_t n_x, std::size_t n_u, std::size_t n_samples, double delta);

// ---------------------------------------------------------------------------
// Single-trajectory (small-ball) bounds
// ---------------------------------------------------------------------------

struct SmallBallTail {
  double threshold = 0.0;    // (nu^2 p^2 / 8) k floor(T/k)
  double probability = 0.0;  // exp(-floor(T/k) p^2 / 8)
};

SmallBallTail small_ball_tail(std::size_t k, double nu, double p, std::size_t horizon);

struct BmsbMargin {
  double nu = 0.0;
  double p = 0.0;
};

/// Small-ball margin (sqrt(v^T Gamma_{ceil(k/2)} v), 3/20) of <x_t, v> for x_{t+1} = A x_t + w_t.
BmsbMargin bmsb_margin_autonomous(const Matrix& a, double sigma_w, std::size_t k, const Vector& v);

/**
 * @brief Linear-response error bound, valid with probability 1 - 3 delta.
 *
 * (90 sigma_w / p) sqrt((l + n log(10/p) + log det(Gmax Gmin^{-1}) + log(1/delta)) / (T lambda_min(Gmin)))
 * with sample condition T >= (10 k / p^2)(log(1/delta) + 2 n log(10/p) + log det(Gmax Gmin^{-1})).
 */
BoundCertificate lwm_bound(std::size_t k, double p, const Matrix& gamma_min, const Matrix& gamma_max,
                           double sigma_w, std::size_t n, std::size_t ell, std::size_t horizon, double delta);

struct StrictlyStable {
  double tau = 1.0;
  double rho = 0.5;
  double sigma_w = 1.0;
};

struct Orthogonal {
  std::size_t horizon = 0;
  std::size_t n = 0;
  double delta = 0.1;
};

using BlockRegime = std::variant<StrictlyStable, Orthogonal>;

/// Block length k, rounded up and at least 1.
std::size_t choose_k(const BlockRegime& regime);

/// (tau, rho) with ||A^j|| <= tau rho^j for all j, for rho(A) < 1.
StrictlyStable stability_envelope(const Matrix& a, double sigma_w);

/**
 * @brief lwm_bound for the autonomous system x_{t+1} = A x_t + w_t, holding with probability 1 - delta.
 *
 * Runs lwm_bound at delta / 3 with Gamma_min = Gamma_{ceil(k/2)}, Gamma_max = (3 n / delta) Gamma_T
 * and p = 3/20. k comes from choose_k: the envelope regime when rho(A) < 1, the orthogonal one
 * otherwise; it is capped at T.
 */
BoundCertificate lwm_system_bound(const Matrix& a, double sigma_w, std::size_t horizon, double delta);

} // namespace sysid

#endif // SYSID_THEORY_BOUNDS_HPP
