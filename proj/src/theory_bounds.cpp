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
#include "sysid/theory_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sysid/error.hpp"
#include "sysid/lti.hpp"

namespace sysid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_condition(const std::string& lhs, double lhs_value, const std::string& rhs, double rhs_value) {
  std::ostringstream os;
  os.precision(6);
  os << lhs << " >= " << rhs << " (" << lhs_value << " < " << rhs_value << ")";
  return os.str();
}

void flag_sample_size(BoundCertificate& cert, const std::string& name, double have, const std::string& rule,
                      double need) {
  if (have < need) {
    cert.precondition_ok = false;
    cert.violated_condition = fmt_condition(name, have, rule, need);
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  }
}

} // namespace

TailParams TailParams::sub_gaussian(double sigma2) {
  require_positive(sigma2, "sigma2");
  return {TailKind::SubGaussian, sigma2, sigma2, 0.0};
}

TailParams TailParams::sub_exponential(double nu2, double alpha) {
  require_positive(nu2, "nu2");
  require_positive(alpha, "alpha");
  return {TailKind::SubExponential, nu2, nu2, alpha};
}

TailParams operator+(const TailParams& lhs, const TailParams& rhs) {
  if (lhs.kind == TailKind::SubGaussian && rhs.kind == TailKind::SubGaussian) {
    return TailParams::sub_gaussian(lhs.sigma2 + rhs.sigma2);
  }
  // A sub-Gaussian term is sub-exponential with alpha -> 0.
  const double nu2 = lhs.variance_proxy() + rhs.variance_proxy();
  return TailParams::sub_exponential(nu2, std::max(lhs.alpha, rhs.alpha));
}

double bounded_sigma2(double lo, double hi) {
  if (!(hi >= lo)) {
    throw Error(ErrorCode::InvalidArgument, "bounded_sigma2 needs hi >= lo");
  }
  return (hi - lo) * (hi - lo) / 4.0;
}

double hoeffding_radius(double sigma2, std::size_t n, double delta, Sides sides) {
  require_delta(delta, "hoeffding_radius");
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "hoeffding_radius needs N >= 1");
  }
  const double effective = sides == Sides::Two ? delta / 2.0 : delta;
  return std::sqrt(2.0 * sigma2 * std::log(1.0 / effective) / static_cast<double>(n));
}

double hoeffding_bounded_tail(std::size_t n, double t, double lo, double hi) {
  if (t < 0.0) {
    throw Error(ErrorCode::NegativeDeviation, "hoeffding_bounded_tail needs t >= 0");
  }
  const double width = hi - lo;
  return std::exp(-2.0 * static_cast<double>(n) * t * t / (width * width));
}

double probability_estimation_radius(std::size_t n, double delta) {
  require_delta(delta, "probability_estimation_radius");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double gaussian_tail(double t, double sigma2) {
  if (t < 0.0) {
    throw Error(ErrorCode::NegativeDeviation, "gaussian_tail needs t >= 0");
  }
  return std::exp(-t * t / (2.0 * sigma2));
}

double subexp_tail(double nu2, double alpha, double t) {
  if (t < 0.0) {
    throw Error(ErrorCode::NegativeDeviation, "subexp_tail needs t >= 0");
  }
  require_positive(nu2, "nu2");
  require_positive(alpha, "alpha");
  if (t <= nu2 / alpha) {
    return std::exp(-t * t / (2.0 * nu2));
  }
  return std::exp(-t / (2.0 * alpha));
}

double chernoff_numeric(const std::function<double(double)>& log_mgf, double t, double b) {
  if (!(b > 0.0)) {
    return 1.0;
  }
  auto objective = [&](double lambda) { return log_mgf(lambda) - lambda * t; };

  constexpr int kGrid = 4000;
  double best = objective(0.0);
  int best_i = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const double value = objective(b * i / kGrid);
    if (value < best) {
      best = value;
      best_i = i;
    }
  }
  // Golden-section search on the bracket around the best grid point.
  double lo = b * std::max(0, best_i - 1) / kGrid;
  double hi = b * std::min(kGrid, best_i + 1) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = objective(c);
  double fd = objective(d);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, b); ++iter) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = objective(d);
    }
    best = std::min({best, fc, fd});
  }
  return std::min(1.0, std::exp(best));
}

bool in_mgf_domain(MgfKind kind, double lambda) {
  switch (kind) {
  case MgfKind::ChiSqCentered: return lambda < 0.5;
  case MgfKind::GaussProduct: return std::abs(lambda) < 1.0;
  }
  return false;
}

double log_mgf_closed_form(MgfKind kind, double lambda) {
  if (!in_mgf_domain(kind, lambda)) {
    throw Error(ErrorCode::DomainExceeded, "lambda outside the MGF domain");
  }
  switch (kind) {
  case MgfKind::ChiSqCentered: return -lambda - 0.5 * std::log1p(-2.0 * lambda);
  case MgfKind::GaussProduct: return -0.5 * std::log1p(-lambda * lambda);
  }
  return 0.0;
}

double mgf_closed_form(MgfKind kind, double lambda) {
  return std::exp(log_mgf_closed_form(kind, lambda));
}

DominationResult subexp_domination_check(MgfKind kind, double nu2, double alpha, std::span<const double> grid) {
  DominationResult result;
  result.pass = true;
  result.worst_slack = kInf;
  for (double lambda : grid) {
    if (std::abs(lambda) > 1.0 / alpha) {
      throw Error(ErrorCode::DomainExceeded, "grid point outside |lambda| <= 1/alpha");
    }
    const double slack = std::exp(nu2 * lambda * lambda / 2.0) - mgf_closed_form(kind, lambda);
    if (slack < result.worst_slack) {
      result.worst_slack = slack;
      result.worst_lambda = lambda;
    }
    if (slack < 0.0) {
      result.pass = false;
    }
  }
  return result;
}

std::vector<double> open_grid(double lo, double hi, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * (static_cast<double>(i) + 1.0) / (static_cast<double>(points) + 1.0);
  }
  return grid;
}

BoundCertificate scalar_error_bound(double sigma_w, double sigma_x, std::size_t n, double delta) {
  require_delta(delta, "scalar_error_bound");
  require_positive(sigma_x, "sigma_x");
  BoundCertificate cert;
  cert.delta = delta;
  cert.source = "scalar_error_bound";
  const double nn = static_cast<double>(n);
  cert.value = n == 0 ? kInf : 4.0 * (sigma_w / sigma_x) * std::sqrt(std::log(4.0 / delta) / nn);
  flag_sample_size(cert, "N", nn, "32 log(2/delta)", 32.0 * std::log(2.0 / delta));
  return cert;
}

BoundCertificate scalar_sum_squares_lower_bound(double sigma_x, std::size_t n, double delta) {
  require_delta(delta, "scalar_sum_squares_lower_bound");
  BoundCertificate cert;
  cert.delta = delta;
  cert.source = "scalar_sum_squares_lower_bound";
  const double nn = static_cast<double>(n);
  cert.value = sigma_x * sigma_x * nn / 2.0;
  flag_sample_size(cert, "N", nn, "32 log(1/delta)", 32.0 * std::log(1.0 / delta));
  return cert;
}

BoundCertificate scalar_cross_upper_bound(double sigma_x, double sigma_w, std::size_t n, double delta) {
  require_delta(delta, "scalar_cross_upper_bound");
  BoundCertificate cert;
  cert.delta = delta;
  cert.source = "scalar_cross_upper_bound";
  const double nn = static_cast<double>(n);
  cert.value = 2.0 * sigma_x * sigma_w * std::sqrt(nn * std::log(2.0 / delta));
  flag_sample_size(cert, "N", nn, "log(2/delta)/2", 0.5 * std::log(2.0 / delta));
  return cert;
}

BoundCertificate cross_term_norm_bound(double norm_sigma_x, double norm_sigma_w, std::size_t n_samples,
                                       std::size_t n, std::size_t m, double delta) {
  require_delta(delta, "cross_term_norm_bound");
  BoundCertificate cert;
  cert.delta = delta;
  cert.source = "cross_term_norm_bound";
  const double nn = static_cast<double>(n_samples);
  const double dims = static_cast<double>(n + m);
  const double log_term = std::log(9.0 / delta);
  cert.value = 4.0 * std::sqrt(norm_sigma_x) * std::sqrt(norm_sigma_w) * std::sqrt(nn * dims * log_term);
  flag_sample_size(cert, "N", nn, "(n+m) log(9/delta)/2", 0.5 * dims * log_term);
  return cert;
}

BoundCertificate min_eig_lower_bound(double lambda_min_sigma, std::size_t n_samples, std::size_t n,
                                     double delta) {
  require_delta(delta, "min_eig_lower_bound");
  BoundCertificate cert;
  cert.delta = delta;
  cert.source = "min_eig_lower_bound";
  const double nn = static_cast<double>(n_samples);
  cert.value = std::max(0.0, lambda_min_sigma) * nn / 2.0;
  flag_sample_size(cert, "N", nn, "24 n log(9/delta)", 24.0 * static_cast<double>(n) * std::log(9.0 / delta));
  return cert;
}

MatrixErrorBounds matrix_error_bounds(double lambda_min_sigma_x, double sigma_w, double sigma_u,
                                      std::size_t n_x, std::size_t n_u, std::size_t n_samples, double delta) {
  require_delta(delta, "matrix_error_bounds");
  const double nn = static_cast<double>(n_samples);
  const double log_term = std::log(54.0 / delta);
  const double rate = n_samples == 0
                          ? kInf
                          : std::sqrt(static_cast<double>(2 * n_x + n_u) * log_term / nn);
  const double need = 24.0 * static_cast<double>(n_x + n_u) * log_term;

  MatrixErrorBounds out;
  out.eps_a.delta = delta;
  out.eps_a.source = "matrix_error_bound_A";
  out.eps_a.value = lambda_min_sigma_x > 0.0 ? 8.0 * sigma_w / std::sqrt(lambda_min_sigma_x) * rate : kInf;
  flag_sample_size(out.eps_a, "N", nn, "24 (n_x+n_u) log(54/delta)", need);
  if (!(lambda_min_sigma_x > 0.0) && out.eps_a.precondition_ok) {
    out.eps_a.precondition_ok = false;
    out.eps_a.violated_condition = "lambda_min(Sigma_x) > 0";
  }

  out.eps_b.delta = delta;
  out.eps_b.source = "matrix_error_bound_B";
  if (!(sigma_u > 0.0)) {
    out.eps_b.value = kInf;
    out.eps_b.precondition_ok = false;
    out.eps_b.violated_condition = "ZeroSigmaU: sigma_u must be positive for the B bound";
  } else {
    out.eps_b.value = 8.0 * sigma_w / sigma_u * rate;
    flag_sample_size(out.eps_b, "N", nn, "24 (n_x+n_u) log(54/delta)", need);
  }
  return out;
}

SmallBallTail small_ball_tail(std::size_t k, double nu, double p, std::size_t horizon) {
  if (k == 0 || k > horizon) {
    throw Error(ErrorCode::InvalidBlock, "block length k must satisfy 1 <= k <= T");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  }
  require_positive(nu, "nu");
  const double blocks = static_cast<double>(horizon / k);
  return {nu * nu * p * p / 8.0 * static_cast<double>(k) * blocks, std::exp(-blocks * p * p / 8.0)};
}

BmsbMargin bmsb_margin_autonomous(const Matrix& a, double sigma_w, std::size_t k, const Vector& v) {
  if (k == 0) {
    throw Error(ErrorCode::InvalidBlock, "block length k must be >= 1");
  }
  if (v.size() != a.rows() || std::abs(v.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotUnitVector, "direction must be a unit vector of dimension n_x");
  }
  const Matrix gamma = noise_gramian(a, sigma_w, (k + 1) / 2);
  return {std::sqrt(std::max(0.0, v.dot(gamma * v))), 3.0 / 20.0};
}

BoundCertificate lwm_bound(std::size_t k, double p, const Matrix& gamma_min, const Matrix& gamma_max,
                           double sigma_w, std::size_t n, std::size_t ell, std::size_t horizon, double delta) {
  require_delta(delta, "lwm_bound");
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  }
  if (gamma_min.rows() != gamma_max.rows() || gamma_min.cols() != gamma_max.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Gamma_min and Gamma_max differ in shape");
  }
  const double lmin = min_eigenvalue(gamma_min);
  if (!(lmin > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Gamma_min must be positive definite");
  }
  const Matrix diff = symmetrize(gamma_max - gamma_min);
  if (min_eigenvalue(diff) < -kPsdTol * std::max(trace_scale(gamma_max), trace_scale(gamma_min))) {
    throw Error(ErrorCode::NotOrdered, "Gamma_max - Gamma_min is not PSD");
  }
  const double logdet = std::max(0.0, logdet_ratio(gamma_max, gamma_min));
  const double log_p = std::log(10.0 / p);
  const double nn = static_cast<double>(n);

  BoundCertificate cert;
  cert.delta = delta;
  cert.source = "lwm_bound";
  const double numer = static_cast<double>(ell) + nn * log_p + logdet + std::log(1.0 / delta);
  cert.value = horizon == 0 ? kInf : 90.0 * sigma_w / p * std::sqrt(numer / (static_cast<double>(horizon) * lmin));
  const double need = 10.0 * static_cast<double>(k) / (p * p) * (std::log(1.0 / delta) + 2.0 * nn * log_p + logdet);
  flag_sample_size(cert, "T", static_cast<double>(horizon), "(10k/p^2)(log(1/delta) + 2n log(10/p) + log det)", need);
  return cert;
}

std::size_t choose_k(const BlockRegime& regime) {
  if (const auto* s = std::get_if<StrictlyStable>(&regime)) {
    if (!(s->rho < 1.0)) {
      throw Error(ErrorCode::UnstableRho, "strictly stable block length needs rho < 1");
    }
    if (!(s->rho > 0.0) || !(s->tau >= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "strictly stable block length needs rho in (0,1), tau >= 1");
    }
    const double arg = 2.0 * s->sigma_w * s->sigma_w * s->tau * s->tau / (1.0 - s->rho * s->rho);
    // A non-positive log would give a block shorter than one step.
    const double k = std::max(0.0, std::log(arg)) / (1.0 - s->rho);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k)));
  }
  const auto& o = std::get<Orthogonal>(regime);
  require_delta(o.delta, "choose_k");
  const double scale = static_cast<double>(o.n) * std::log(static_cast<double>(o.n) / o.delta);
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "n log(n/delta) must be positive");
  }
  if (static_cast<double>(o.horizon) < scale) {
    throw Error(ErrorCode::InvalidArgument, "orthogonal block length needs T >= n log(n/delta)");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(o.horizon) / scale)));
}

StrictlyStable stability_envelope(const Matrix& a, double sigma_w) {
  const double radius = spectral_radius(a);
  if (!(radius < 1.0)) {
    throw Error(ErrorCode::UnstableRho, "stability envelope needs spectral radius < 1");
  }
  StrictlyStable env;
  env.sigma_w = sigma_w;
  env.rho = (1.0 + radius) / 2.0;
  env.tau = 1.0;
  Matrix power = Matrix::Identity(a.rows(), a.cols());
  double scale = 1.0;
  for (int j = 1; j <= 100000; ++j) {
    power = (power * a).eval();
    scale *= env.rho;
    const double ratio = spectral_norm(power) / scale;
    env.tau = std::max(env.tau, ratio);
    if (ratio < 1e-3 && j > 16) {
      break;
    }
  }
  return env;
}

BoundCertificate lwm_system_bound(const Matrix& a, double sigma_w, std::size_t horizon, double delta) {
  require_delta(delta, "lwm_system_bound");
  if (horizon == 0) {
    throw Error(ErrorCode::InvalidBlock, "lwm_system_bound needs T >= 1");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  const double part = delta / 3.0;
  std::size_t k = spectral_radius(a) < 1.0 - 1e-9 ? choose_k(stability_envelope(a, sigma_w))
                                                  : choose_k(Orthogonal{horizon, n, part});
  k = std::min(k, horizon);
  const Matrix gamma_min = noise_gramian(a, sigma_w, (k + 1) / 2);
  const Matrix gamma_max = static_cast<double>(n) / part * noise_gramian(a, sigma_w, horizon);
  BoundCertificate cert = lwm_bound(k, 3.0 / 20.0, gamma_min, gamma_max, sigma_w, n, n, horizon, part);
  cert.delta = delta;
  return cert;
}

} // namespace sysid
