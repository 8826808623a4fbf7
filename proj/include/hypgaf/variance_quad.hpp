#pragma once

// Direct evaluation of the boundary integral
//
//   I_L(r) = int_{-pi}^{pi} a^{2L} / (|1 - r^2 e^{it}|^{2L} - a^{2L})
//                           * 2 (1 - cos t) / |1 - r^2 e^{it}|^2 dt,   a = 1 - r^2,
//
// and of E[n_L(r)], V[n_L(r)] = L^2 r^4 / (2 pi a^2) * I_L(r).
//
// Both integration variables are expressed through
//   u = 4 r^2 sin^2(t/2) / a^2,
// for which |1 - r^2 e^{it}|^2 = a^2 (1 + u); the t-integrand becomes
// u / (r^2 (1 + u) ((1 + u)^L - 1)), free of cancellation as t -> 0.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hypgaf/asymptotics.hpp"
#include "hypgaf/error.hpp"
#include "hypgaf/model.hpp"
#include "hypgaf/quadrature.hpp"

namespace hypgaf {

struct IntegralResult {
  double value = 0.0;
  double err_est = 0.0;
  QuadForm form = QuadForm::theta;
  long evaluations = 0;
};

namespace detail {

// 1 / ((1 + x)^L - 1)
inline double inverse_power_excess(double L, double x) {
  return 1.0 / std::expm1(L * std::log1p(x));
}

// x-form integrand without the endpoint factor (1 - x/X)^{-1/2}
inline double x_core(double L, double x) {
  return std::sqrt(x) / (1.0 + x) * inverse_power_excess(L, x);
}

inline std::vector<double> theta_breakpoints(double a) {
  std::vector<double> pts = {0.0};
  for (double t = a; t < 1.0; t *= 4.0) pts.push_back(t);
  pts.push_back(std::sqrt(a));
  pts.push_back(1.0);
  pts.push_back(std::numbers::pi);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double t : pts) {
    if (t > std::numbers::pi) continue;
    if (out.empty() || t > out.back() * (1.0 + 1e-12)) out.push_back(t);
  }
  if (out.back() != std::numbers::pi) out.back() = std::numbers::pi;
  return out;
}

}  // namespace detail

inline double integrand_theta(const ModelParams& p, double theta) {
  p.validate();
  if (!(std::abs(theta) <= std::numbers::pi * (1.0 + 1e-15))) {
    throw DomainError("integrand_theta: theta must lie in [-pi, pi]");
  }
  const double a = p.one_minus_r2();
  const double r2 = p.r * p.r;
  const double s = 2.0 * p.r * std::sin(0.5 * theta) / a;
  const double u = s * s;
  if (u == 0.0) return 1.0 / (p.L * r2);
  return u / (r2 * (1.0 + u)) * detail::inverse_power_excess(p.L, u);
}

// Upper end 4 r^2 / (1 - r^2)^2 of the x-form range.
inline double x_form_upper(const ModelParams& p) {
  const double s = 2.0 * p.r / p.one_minus_r2();
  return s * s;
}

inline double integrand_x(const ModelParams& p, double x) {
  p.validate();
  const double X = x_form_upper(p);
  if (!(x > 0.0 && x < X)) throw DomainError("integrand_x: x must lie in (0, 4r^2/(1-r^2)^2)");
  return detail::x_core(p.L, x) / std::sqrt(1.0 - x / X);
}

inline IntegralResult compute_I(const ModelParams& p, const QuadConfig& cfg = {}) {
  p.validate();
  cfg.validate();
  if (p.r > kMaxQuadRadius) {
    throw DomainError("compute_I: r beyond 1 - 1e-12 exceeds double precision");
  }
  const quad::Options qo{cfg.rel_tol, cfg.abs_tol, cfg.max_depth};
  const double a = p.one_minus_r2();
  const double r = p.r;
  const double L = p.L;

  if (cfg.form == QuadForm::theta) {
    const auto pts = detail::theta_breakpoints(a);
    const auto res = quad::integrate([&p](double t) { return integrand_theta(p, t); },
                                     std::span<const double>(pts), qo);
    return {2.0 * res.value, 2.0 * res.err_est, QuadForm::theta, res.evaluations};
  }

  // x-form: x = t^2 on [0, X/2] and x = X (1 - u^2) on [X/2, X]; both
  // images are bounded at their endpoints.
  const double X = x_form_upper(p);
  const double t_mid = std::sqrt(0.5 * X);
  auto left = [L, X](double t) {
    if (t == 0.0) return 2.0 / L;
    const double x = t * t;
    return 2.0 * x / (1.0 + x) * detail::inverse_power_excess(L, x) / std::sqrt(1.0 - x / X);
  };
  auto right = [L, X](double u) {
    const double x = X * (1.0 - u * u);
    return 2.0 * X * detail::x_core(L, x);
  };
  std::vector<double> left_pts = {0.0};
  for (double t = 1.0 / 64.0; t < t_mid; t *= 4.0) left_pts.push_back(t);
  if (left_pts.back() < t_mid * (1.0 - 1e-12)) {
    left_pts.push_back(t_mid);
  } else {
    left_pts.back() = t_mid;
  }
  const std::array<double, 4> right_pts = {0.0, 0.25, 0.5, std::sqrt(0.5)};

  // each half to the full tolerance; the sum then meets it as well
  const auto lres = quad::integrate(left, std::span<const double>(left_pts), qo);
  const auto rres = quad::integrate(right, std::span<const double>(right_pts), qo);
  const double scale = a / (r * r * r);
  return {scale * (lres.value + rres.value), scale * (lres.err_est + rres.err_est), QuadForm::x,
          lres.evaluations + rres.evaluations};
}

// V[n_L(r)] by quadrature. Radii beyond the quadrature cap are answered by
// the fixed-L asymptotic law.
inline VarianceReport variance(const ModelParams& p, const QuadConfig& cfg = {}) {
  p.validate();
  if (p.r > kMaxQuadRadius) return asymptotics::asymptotic_variance(p);
  const auto I = compute_I(p, cfg);
  const double pref = variance_prefactor(p);
  VarianceReport rep;
  rep.params = p;
  rep.mean = expected_count(p);
  rep.variance = pref * I.value;
  rep.method = Method::quad;
  rep.regime = classify_regime(p);
  rep.err_est = pref * I.err_est;
  return rep;
}

}  // namespace hypgaf
