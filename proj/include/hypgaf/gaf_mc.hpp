#pragma once

// Monte Carlo ground truth for n_L(r): draw the hyperbolic GAF as a truncated
// random power series, count its zeros in |z| < r with the argument
// principle, and aggregate mean and variance of the count.
//
// Sample i uses its own engine seeded from (seed, i), so results do not
// depend on how samples are distributed over threads.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hypgaf/error.hpp"
#include "hypgaf/model.hpp"
#include "hypgaf/specfun.hpp"

namespace hypgaf::mc {

using complex = std::complex<double>;

struct McConfig {
  int samples = 4000;
  std::uint64_t seed = 7;
  double trunc_eps = 1e-12;
  int circle_points_init = 256;
  int max_refine = 40;
  int threads = 1;

  void validate() const {
    if (samples < 2) throw DomainError("McConfig: samples must be >= 2");
    if (!(trunc_eps > 0.0 && trunc_eps <= 1e-3)) {
      throw DomainError("McConfig: trunc_eps must lie in (0, 1e-3]");
    }
    if (circle_points_init < 4) throw DomainError("McConfig: circle_points_init must be >= 4");
    if (max_refine < 0) throw DomainError("McConfig: max_refine must be >= 0");
  }
};

struct GafSample {
  std::vector<complex> coeffs;  // c_0 .. c_N
  int trunc_order = 0;          // N
  ModelParams params;
  std::optional<int> zero_count;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

struct McSummary {
  double L = 0.0;
  double r = 0.0;
  int n_samples = 0;
  double mean_hat = 0.0;
  double var_hat = 0.0;  // unbiased
  Interval mean_ci_95;
  Interval var_ci_95;
  std::uint64_t seed = 0;
  int trunc_order = 0;
  bool mean_dominated = false;  // E[n] < 1e-4; the variance interval is not informative
};

// log of the coefficient standard deviation, (1/2) log binom(L + n - 1, n).
inline double log_coeff_weight(double L, int n) {
  if (!(L > 0.0)) throw DomainError("log_coeff_weight: L must be positive");
  if (n < 0) throw DomainError("log_coeff_weight: n must be >= 0");
  return 0.5 * (specfun::ln_gamma_ratio(L + n, n + 1.0) - specfun::ln_gamma(L));
}

// Smallest N >= 1 whose tail sum_{n>N} binom(L+n-1, n) r^{2n} is at most
// trunc_eps (1 - r^2)^{-L}. The tail is bounded by t_{N+1} / (1 - q) with q
// the supremum of the remaining term ratios (L + m) r^2 / (m + 1).
inline int truncation_order(const ModelParams& p, double trunc_eps) {
  p.validate();
  if (!(trunc_eps > 0.0 && trunc_eps <= 1e-3)) {
    throw DomainError("truncation_order: trunc_eps must lie in (0, 1e-3]");
  }
  const double log_r2 = 2.0 * std::log(p.r);
  const double log_target = std::log(trunc_eps) - p.L * std::log(p.one_minus_r2());
  double log_next = std::log(p.L) + log_r2;  // log t_1
  for (int N = 0; N < 100'000'000; ++N) {
    // log_next = log t_{N+1}
    const double ratio_sup = std::max(1.0, (p.L + N + 1.0) / (N + 2.0));
    const double q = std::exp(log_r2) * ratio_sup;
    if (q < 1.0 && log_next - std::log1p(-q) <= log_target) return std::max(N, 1);
    log_next += std::log((p.L + N + 1.0) / (N + 2.0)) + log_r2;
  }
  throw ConvergenceFailure("truncation_order: no admissible order", trunc_eps);
}

inline std::vector<double> coefficient_scales(double L, int N) {
  std::vector<double> s(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) s[n] = std::exp(log_coeff_weight(L, n));
  return s;
}

// Engine for sample `index` of a run seeded with `seed`.
inline std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Standard complex normal: independent real and imaginary parts of variance 1/2.
template <class Engine>
complex standard_complex_normal(Engine& eng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(eng);
  const double im = half(eng);
  return {re, im};
}

template <class Engine>
GafSample sample_gaf(const ModelParams& p, std::span<const double> scales, Engine& eng) {
  if (scales.size() < 2) throw DomainError("sample_gaf: truncation order must be >= 1");
  GafSample s;
  s.params = p;
  s.trunc_order = static_cast<int>(scales.size()) - 1;
  s.coeffs.resize(scales.size());
  for (std::size_t n = 0; n < scales.size(); ++n) {
    s.coeffs[n] = standard_complex_normal(eng) * scales[n];
  }
  return s;
}

template <class Engine>
GafSample sample_gaf(const ModelParams& p, int N, Engine& eng) {
  p.validate();
  if (N < 1) throw DomainError("sample_gaf: truncation order must be >= 1");
  const auto scales = coefficient_scales(p.L, N);
  return sample_gaf(p, std::span<const double>(scales), eng);
}

inline complex evaluate(std::span<const complex> coeffs, complex z) {
  complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

struct Winding {
  int count = 0;
  int points = 0;  // uniform base resolution
  int extra_points = 0;  // added by local refinement
};

namespace detail {

struct ArcWalker {
  std::span<const complex> coeffs;
  double r;
  int max_depth;
  double floor;  // |f| below this counts as a zero on the circle
  int extra = 0;

  complex at(double t) {
    ++extra;
    const complex f = evaluate(coeffs, std::polar(r, t));
    if (!(std::abs(f) >= floor)) {
      throw CircleTooClose("winding_number: |f| nearly vanishes on the circle");
    }
    return f;
  }

  // phase change of f along the arc [t0, t1], bisected until every
  // increment is below pi/2
  double increment(double t0, double t1, complex f0, complex f1, int depth) {
    const double step = std::arg(f1 / f0);
    if (std::abs(step) < 0.5 * std::numbers::pi) return step;
    if (depth >= max_depth) {
      throw RefinementExhausted("winding_number: phase increments did not settle after " +
                                std::to_string(depth) + " refinements");
    }
    const double tm = 0.5 * (t0 + t1);
    const complex fm = at(tm);
    return increment(t0, tm, f0, fm, depth + 1) + increment(tm, t1, fm, f1, depth + 1);
  }
};

}  // namespace detail

// Winding number of f around |z| = r. The base grid has at least
// 2 (deg + 1) points, so no single term z^n turns by more than pi between
// neighbours and aliased increments cannot pass the pi/2 test. Arcs whose
// phase increment reaches pi/2 are bisected locally, at most max_refine
// times, which resolves zeros lying close to the circle.
inline Winding winding_number(std::span<const complex> coeffs, double r, const McConfig& cfg) {
  if (coeffs.empty()) throw DomainError("winding_number: empty coefficient vector");
  if (!(r > 0.0)) throw DomainError("winding_number: radius must be positive");
  const auto min_points = std::bit_ceil(2 * coeffs.size());
  const int M = std::max(cfg.circle_points_init, static_cast<int>(min_points));
  std::vector<complex> values(M);
  double fmax = 0.0;
  for (int k = 0; k < M; ++k) {
    values[k] = evaluate(coeffs, std::polar(r, 2.0 * std::numbers::pi * k / M));
    fmax = std::max(fmax, std::abs(values[k]));
  }
  detail::ArcWalker walk{coeffs, r, cfg.max_refine, 1e-12 * fmax};
  for (const auto& v : values) {
    if (!(std::abs(v) >= walk.floor)) {
      throw CircleTooClose("winding_number: |f| nearly vanishes on the circle");
    }
  }
  double total = 0.0;
  for (int k = 0; k < M; ++k) {
    const double t0 = 2.0 * std::numbers::pi * k / M;
    const double t1 = 2.0 * std::numbers::pi * (k + 1) / M;
    total += walk.increment(t0, t1, values[k], values[(k + 1) % M], 0);
  }
  return {static_cast<int>(std::lround(total / (2.0 * std::numbers::pi))), M, walk.extra};
}

inline int count_zeros(std::span<const complex> coeffs, double r, const McConfig& cfg = {}) {
  return winding_number(coeffs, r, cfg).count;
}

inline int count_zeros(const GafSample& s, double r, const McConfig& cfg = {}) {
  return count_zeros(std::span<const complex>(s.coeffs), r, cfg);
}

// Running moments up to fourth order (Pebay's one-pass update).
class MomentAccumulator {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean_ += dn;
    m4_ += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
    m3_ += term1 * dn * (n - 2.0) - 3.0 * dn * m2_;
    m2_ += term1;
  }
  long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
  // biased central moments
  double central2() const { return n_ > 0 ? m2_ / n_ : 0.0; }
  double central4() const { return n_ > 0 ? m4_ / n_ : 0.0; }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

inline McSummary summarize(std::span<const int> counts, const ModelParams& p, const McConfig& cfg,
                           int trunc_order) {
  MomentAccumulator acc;
  for (int c : counts) acc.add(c);
  const double n = static_cast<double>(acc.count());
  const double s2 = acc.variance();
  const double mean_se = std::sqrt(s2 / n);
  // Var(s^2) ~ (mu4 - (n-3)/(n-1) sigma^4) / n
  const double var_var = std::max(0.0, (acc.central4() - (n - 3.0) / (n - 1.0) * s2 * s2) / n);
  const double var_se = std::sqrt(var_var);

  McSummary out;
  out.L = p.L;
  out.r = p.r;
  out.n_samples = static_cast<int>(acc.count());
  out.mean_hat = acc.mean();
  out.var_hat = s2;
  out.mean_ci_95 = {acc.mean() - kZ95 * mean_se, acc.mean() + kZ95 * mean_se};
  out.var_ci_95 = {std::max(0.0, s2 - kZ95 * var_se), s2 + kZ95 * var_se};
  out.seed = cfg.seed;
  out.trunc_order = trunc_order;
  out.mean_dominated = expected_count(p) < 1e-4;
  return out;
}

// Count for sample `index`, retrying at slightly smaller radii when the
// circle passes too close to a zero.
inline int sample_count(const ModelParams& p, std::span<const double> scales, const McConfig& cfg,
                        std::uint64_t index) {
  auto eng = sample_engine(cfg.seed, index);
  const GafSample s = sample_gaf(p, scales, eng);
  double radius = p.r;
  constexpr int kRetries = 3;
  for (int attempt = 0;; ++attempt) {
    try {
      return count_zeros(s, radius, cfg);
    } catch (const NumericalError&) {
      if (attempt == kRetries) throw;
      radius *= 1.0 - 1e-9;
    }
  }
}

inline std::vector<int> sample_counts(const ModelParams& p, const McConfig& cfg, int trunc_order) {
  const auto scales = coefficient_scales(p.L, trunc_order);
  std::vector<int> counts(cfg.samples);
  const int workers = std::clamp(cfg.threads, 1, cfg.samples);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<int> first_bad(workers, cfg.samples);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.samples; i += workers) {
          try {
            counts[i] = sample_count(p, scales, cfg, static_cast<std::uint64_t>(i));
          } catch (...) {
            errors[w] = std::current_exception();
            first_bad[w] = i;
            return;
          }
        }
      });
    }
  }
  // report the failure with the smallest sample index, independent of scheduling
  const auto it = std::min_element(first_bad.begin(), first_bad.end());
  if (*it < cfg.samples) std::rethrow_exception(errors[it - first_bad.begin()]);
  return counts;
}

inline McSummary mc_estimate(const ModelParams& p, const McConfig& cfg = {}) {
  p.validate();
  cfg.validate();
  const int N = truncation_order(p, cfg.trunc_eps);
  const auto counts = sample_counts(p, cfg, N);
  return summarize(counts, p, cfg, N);
}

}  // namespace hypgaf::mc
