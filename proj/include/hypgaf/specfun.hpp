#pragma once

// Real special functions used by the variance evaluators: log-gamma, Gamma
// ratios, Beta, zeta(3/2) and the dilogarithm on [0, 1].

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hypgaf/error.hpp"

namespace hypgaf::specfun {

struct Accuracy {
  double rel_tol = 1e-12;
  int max_terms = 1'000'000;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
      throw DomainError("Accuracy: rel_tol must lie in (0, 1)");
    }
    if (max_terms < 1) throw DomainError("Accuracy: max_terms must be >= 1");
  }
};

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178032973640561764;

// Sum_{n >= first} n^{-s} for real s > 1 by Euler-Maclaurin, with the head
// summed directly up to n = cut - 1.
inline double zeta_sum_from(double s, int first, int cut = 32) {
  // B_{2j} / (2j)!
  static constexpr std::array<double, 7> kB = {
      1.0 / 12.0,          -1.0 / 720.0,         1.0 / 30240.0,
      -1.0 / 1209600.0,    1.0 / 47900160.0,     -691.0 / 1307674368000.0,
      7.0 / 523069747200.0};
  double head = 0.0;
  for (int n = cut - 1; n >= first; --n) head += std::pow(n, -s);
  const double N = cut;
  double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  // (s)_{2j-1} N^{-s-2j+1}
  double rising = s;
  double power = std::pow(N, -s - 1.0);
  for (std::size_t j = 0; j < kB.size(); ++j) {
    tail += kB[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= N * N;
  }
  return head + tail;
}

// zeta(k) - 1 for k = 0..kSeriesTerms-1 (entries 0 and 1 unused).
inline constexpr int kSeriesTerms = 48;

inline const std::array<double, kSeriesTerms>& zeta_minus_one_table() {
  static const std::array<double, kSeriesTerms> table = [] {
    std::array<double, kSeriesTerms> t{};
    for (int k = 2; k < kSeriesTerms; ++k) t[k] = zeta_sum_from(k, 2);
    return t;
  }();
  return table;
}

// log Gamma(1 + z) for |z| <= 0.25, Taylor series about 1 with the
// logarithmic part split off so the remaining coefficients decay like 2^-k.
inline double ln_gamma_1p(double z) {
  const auto& zm1 = zeta_minus_one_table();
  double sum = 0.0;
  double zk = -z;  // (-z)^k
  for (int k = 2; k < kSeriesTerms; ++k) {
    zk *= -z;
    const double term = zm1[k] * zk / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return -std::log1p(z) + z * (1.0 - kEulerGamma) + sum;
}

// Stirling correction lnGamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)],
// accurate to double precision for x >= 10.
inline double stirling_tail(double x) {
  static constexpr std::array<double, 8> kC = {
      1.0 / 12.0,   -1.0 / 360.0, 1.0 / 1260.0,           -1.0 / 1680.0,
      1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (auto it = kC.rbegin(); it != kC.rend(); ++it) acc = acc * inv2 + *it;
  return acc * inv;
}

inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be positive and finite");
  }
}

}  // namespace detail

inline double ln_gamma(double x) {
  detail::require_positive(x, "ln_gamma");
  if (x < 0.75) return ln_gamma(x + 1.0) - std::log(x);
  if (x <= 1.25) return detail::ln_gamma_1p(x - 1.0);
  if (std::abs(x - 2.0) <= 0.25) {
    const double z = x - 2.0;
    return std::log1p(z) + detail::ln_gamma_1p(z);
  }
  if (x >= 10.0) {
    return (x - 0.5) * std::log(x) - x + detail::kHalfLog2Pi + detail::stirling_tail(x);
  }
  // shift into the Stirling range: Gamma(x) = Gamma(x + n) / (x (x+1) ... (x+n-1))
  double prod = 1.0;
  double y = x;
  while (y < 10.0) {
    prod *= y;
    y += 1.0;
  }
  return ln_gamma(y) - std::log(prod);
}

// log(Gamma(a) / Gamma(b)). For large arguments the leading Stirling terms
// are combined before subtraction so the result keeps absolute accuracy.
inline double ln_gamma_ratio(double a, double b) {
  detail::require_positive(a, "gamma_ratio");
  detail::require_positive(b, "gamma_ratio");
  if (a == b) return 0.0;
  if (a >= 10.0 && b >= 10.0) {
    const double d = a - b;
    return d * std::log(b) + (a - 0.5) * std::log1p(d / b) - d +
           detail::stirling_tail(a) - detail::stirling_tail(b);
  }
  return ln_gamma(a) - ln_gamma(b);
}

inline double gamma_ratio(double a, double b) { return std::exp(ln_gamma_ratio(a, b)); }

// log(Gamma(x + da) / Gamma(x + db)) with the offset difference taken exactly,
// so the result stays accurate when x + da and x + db round to the same double.
inline double ln_gamma_ratio_offset(double x, double da, double db) {
  const double a = x + da;
  const double b = x + db;
  detail::require_positive(a, "gamma_ratio");
  detail::require_positive(b, "gamma_ratio");
  if (a < 10.0 || b < 10.0) return ln_gamma(a) - ln_gamma(b);
  const double d = da - db;
  return d * std::log(b) + (a - 0.5) * std::log1p(d / b) - d + detail::stirling_tail(a) -
         detail::stirling_tail(b);
}

inline double beta(double a, double b) {
  detail::require_positive(a, "beta");
  detail::require_positive(b, "beta");
  // symmetric in (a, b) by construction
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return std::exp(ln_gamma(lo) + ln_gamma(hi) - ln_gamma(lo + hi));
}

// zeta(3/2), computed once.
inline double zeta_three_halves() {
  static const double value = detail::zeta_sum_from(1.5, 1);
  return value;
}

// Li_2(x) = sum x^n / n^2 on [0, 1].
inline double dilog(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("dilog: argument must lie in [0, 1]");
  constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  if (x == 1.0) return kZeta2;
  if (x > 0.5) {
    // Li2(x) + Li2(1-x) = zeta(2) - ln(x) ln(1-x)
    return kZeta2 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
  }
  double sum = 0.0;
  double xn = 1.0;
  for (int n = 1; n < 200; ++n) {
    xn *= x;
    const double term = xn / (static_cast<double>(n) * n);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace hypgaf::specfun
