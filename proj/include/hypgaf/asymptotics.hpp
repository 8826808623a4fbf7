#pragma once

// Leading-order behaviour of V[n_L(r)] as r -> 1: the constant c_L on both
// sides of the L = 1/2 transition and the uniform crossover laws.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "hypgaf/error.hpp"
#include "hypgaf/model.hpp"
#include "hypgaf/quadrature.hpp"
#include "hypgaf/specfun.hpp"

namespace hypgaf::asymptotics {

enum class ConstantForm { integral, gamma_series, subcritical_gamma };

struct AsymptoticConstant {
  double c = 0.0;
  ConstantForm form = ConstantForm::gamma_series;
  double err_est = 0.0;
};

namespace detail {

inline constexpr double kSqrtPi = 1.7724538509055160272981674833411452;

// Gamma(L n - 1/2) / Gamma(L n + 1), continuous in n.
inline double series_term(double L, double n) {
  return std::exp(specfun::ln_gamma_ratio_offset(L * n, -0.5, 1.0));
}

// log(expm1(y)) without overflow for large y.
inline double log_expm1(double y) {
  return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

}  // namespace detail

// c_L = L^2 / (8 sqrt(pi)) * sum_{n>=1} Gamma(Ln - 1/2) / Gamma(Ln + 1), L > 1/2.
// The head is summed directly; the n^{-3/2} tail is closed with an
// Euler-Maclaurin estimate around a quadrature of the continuous term.
inline AsymptoticConstant c_supercritical_series(double L, const specfun::Accuracy& acc = {}) {
  acc.validate();
  if (!(L > 0.5) || !std::isfinite(L)) throw DomainError("c_supercritical_series: need L > 1/2");

  // the Euler-Maclaurin derivatives are taken by finite differences with unit
  // step; their error falls like cut^{-6.5} relative to the sum
  const int cut = std::max(64, static_cast<int>(std::ceil(64.0 / L)));
  if (cut > acc.max_terms) {
    throw ConvergenceFailure("c_supercritical_series: term budget exhausted", acc.rel_tol);
  }
  double head = 0.0;
  for (int n = cut - 1; n >= 1; --n) head += detail::series_term(L, n);

  const double N = cut;
  // integral_N^inf term(t) dt with t = N / v^2
  auto mapped = [L, N](double v) {
    const double t = N / (v * v);
    return detail::series_term(L, t) * 2.0 * N / (v * v * v);
  };
  quad::Options qo;
  qo.rel_tol = std::max(acc.rel_tol, 1e-13);
  const auto tail_int = quad::integrate(mapped, 0.0, 1.0, qo);

  const auto f = [L](double n) { return detail::series_term(L, n); };
  const double d1 = (8.0 * (f(N + 1) - f(N - 1)) - (f(N + 2) - f(N - 2))) / 12.0;
  const double d3 = (f(N + 2) - 2.0 * f(N + 1) + 2.0 * f(N - 1) - f(N - 2)) / 2.0;
  const double tail = tail_int.value + 0.5 * f(N) - d1 / 12.0 + d3 / 720.0;

  const double sum = head + tail;
  const double scale = L * L / (8.0 * detail::kSqrtPi);
  return {scale * sum, ConstantForm::gamma_series, scale * tail_int.err_est};
}

// c_L = L^2 / (2 pi) * int_0^inf x^2 / ((1 + x^2) ((1 + x^2)^L - 1)) dx, L > 1/2.
// [1, inf) is mapped by x = s^{-p} with p chosen so the image integrand stays
// bounded at s = 0.
inline AsymptoticConstant c_supercritical_integral(double L, const QuadConfig& cfg = {}) {
  cfg.validate();
  if (!(L > 0.5) || !std::isfinite(L)) throw DomainError("c_supercritical_integral: need L > 1/2");

  quad::Options qo{cfg.rel_tol, cfg.abs_tol, cfg.max_depth};
  auto near = [L](double x) {
    if (x == 0.0) return 1.0 / L;
    const double x2 = x * x;
    return x2 / ((1.0 + x2) * std::expm1(L * std::log1p(x2)));
  };
  const std::array<double, 4> near_pts = {0.0, 0.25, 0.5, 1.0};
  const auto inner = quad::integrate(near, std::span<const double>(near_pts), qo);

  const double p = L < 1.0 ? 1.0 / (2.0 * L - 1.0) : 1.0;
  auto far = [L, p](double s) {
    const double log_s = std::log(s);
    const double log_x = -p * log_s;
    // log(1 + x^2) and x^2 / (1 + x^2) stay finite when x^2 overflows
    const double log1p_x2 = log_x > 100.0 ? 2.0 * log_x : std::log1p(std::exp(2.0 * log_x));
    const double log_frac = -std::log1p(std::exp(-2.0 * log_x));
    const double log_h = std::log(p) + (-p - 1.0) * log_s + log_frac -
                         detail::log_expm1(L * log1p_x2);
    return std::exp(log_h);
  };
  const std::array<double, 5> far_pts = {0.0, 0.125, 0.25, 0.5, 1.0};
  const auto outer = quad::integrate(far, std::span<const double>(far_pts), qo);

  const double scale = L * L / (2.0 * std::numbers::pi);
  return {scale * (inner.value + outer.value), ConstantForm::integral,
          scale * (inner.err_est + outer.err_est)};
}

// c_L = L^2 Gamma(1/2 - L) / (4 sqrt(pi) Gamma(1 - L)), 0 < L < 1/2.
inline AsymptoticConstant c_subcritical(double L) {
  if (!(L > 0.0 && L < 0.5)) throw DomainError("c_subcritical: need 0 < L < 1/2");
  const double c = L * L * specfun::gamma_ratio(0.5 - L, 1.0 - L) / (4.0 * detail::kSqrtPi);
  return {c, ConstantForm::subcritical_gamma, 0.0};
}

// Fixed-L laws as r -> 1:
//   L > 1/2: c_L / (1 - r)
//   L = 1/2: log(1/(1 - r)) / (8 pi (1 - r))
//   L < 1/2: c_L (1 - r)^{2L - 2}
inline VarianceReport asymptotic_variance(const ModelParams& p, const RegimeBands& bands = {}) {
  p.validate();
  if (p.r < 0.5) throw DomainError("asymptotic_variance: needs r >= 0.5");
  const double g = p.one_minus_r();
  VarianceReport rep;
  rep.params = p;
  rep.mean = expected_count(p);
  rep.method = Method::asymptotic;
  rep.regime = classify_regime(p, bands);
  switch (rep.regime.phase) {
    case Phase::supercritical:
      rep.variance = c_supercritical_series(p.L).c / g;
      break;
    case Phase::critical:
      rep.variance = -std::log(g) / (8.0 * std::numbers::pi * g);
      break;
    case Phase::subcritical:
      rep.variance = c_subcritical(p.L).c * std::pow(g, 2.0 * p.L - 2.0);
      break;
  }
  return rep;
}

enum class CrossoverBranch { automatic, near_half_plus, near_half_minus, small_L };

namespace detail {

// (1 - g^e) / e with g = exp(log_g), continuous through e = 0.
inline double one_minus_pow_over(double e, double log_g) {
  if (e == 0.0) return -log_g;
  return -std::expm1(e * log_g) / e;
}

}  // namespace detail

// Crossover laws, uniform in L and r:
//   near 1/2 from above: (1 - g^{2L-1}) / (8 pi (2L - 1) g)
//   near 1/2 from below: (1 - g^{1-2L}) / (8 pi (1 - 2L) g^{2-2L})
//   L -> 0 with L/g -> inf: (L^2/4) g^{2L-2} / (1 - g^{2L})
// where g = 1 - r. The first two agree at L = 1/2.
inline VarianceReport crossover_variance(const ModelParams& p,
                                         CrossoverBranch branch = CrossoverBranch::automatic,
                                         const RegimeBands& bands = {}) {
  p.validate();
  const double g = p.one_minus_r();
  const double log_g = std::log(g);
  const double L = p.L;
  constexpr double k8Pi = 8.0 * std::numbers::pi;

  VarianceReport rep;
  rep.params = p;
  rep.mean = expected_count(p);
  rep.method = Method::crossover;
  rep.regime = classify_regime(p, bands);

  if (branch == CrossoverBranch::automatic) {
    if (rep.regime.tag == RegimeTag::small_L) {
      branch = CrossoverBranch::small_L;
    } else {
      branch = L >= 0.5 ? CrossoverBranch::near_half_plus : CrossoverBranch::near_half_minus;
    }
  }
  switch (branch) {
    case CrossoverBranch::near_half_plus:
      rep.variance = detail::one_minus_pow_over(2.0 * L - 1.0, log_g) / (k8Pi * g);
      break;
    case CrossoverBranch::near_half_minus:
      rep.variance = detail::one_minus_pow_over(1.0 - 2.0 * L, log_g) *
                     std::exp((2.0 * L - 2.0) * log_g) / k8Pi;
      break;
    case CrossoverBranch::small_L:
      if (L / g < bands.small_L_ratio) {
        throw RegimeMismatch("crossover_variance: small-L law needs L/(1-r) >= " +
                             std::to_string(bands.small_L_ratio));
      }
      rep.variance = 0.25 * L * L * std::exp((2.0 * L - 2.0) * log_g) /
                     (-std::expm1(2.0 * L * log_g));
      break;
    case CrossoverBranch::automatic:
      break;
  }
  return rep;
}

}  // namespace hypgaf::asymptotics
