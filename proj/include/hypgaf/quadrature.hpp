#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod integration over a set of
// seeded panels. The panel with the largest error estimate is bisected until
// the summed estimate meets max(abs_tol, rel_tol * |value|).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "hypgaf/error.hpp"

namespace hypgaf::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_depth = 60;
  int max_segments = 200'000;
};

struct Result {
  double value = 0.0;
  double err_est = 0.0;
  long evaluations = 0;
  int segments = 0;
};

namespace detail {

// Kronrod abscissae, descending; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 15-point rule application with the QUADPACK error heuristic.
template <class F>
Panel apply_rule(F& f, double a, double b, int depth) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double ah = std::abs(half);
  resk *= half;
  resabs *= ah;
  resasc *= ah;

  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  if (!std::isfinite(resk) || !std::isfinite(err)) {
    throw NumericalInstability("quadrature: non-finite integrand value on [" +
                               std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return Panel{a, b, resk, err, depth};
}

}  // namespace detail

// Integrates f over [points.front(), points.back()] with the interior points
// as initial panel boundaries. Points must be strictly increasing.
template <class F>
Result integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
  if (points.size() < 2) throw DomainError("integrate: need at least two breakpoints");
  if (!(opt.rel_tol > 0.0) || opt.max_depth < 1) {
    throw DomainError("integrate: rel_tol must be positive and max_depth >= 1");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) throw DomainError("integrate: breakpoints must increase");
  }

  std::priority_queue<detail::Panel> heap;
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    auto p = detail::apply_rule(f, points[i - 1], points[i], 0);
    evals += 15;
    value += p.value;
    error += p.error;
    heap.push(p);
  }

  auto resum = [&] {
    // exact re-accumulation to shed drift from incremental updates
    auto copy = heap;
    value = 0.0;
    error = 0.0;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
  };

  int since_resum = 0;
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
    if (error <= target) {
      resum();
      if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) break;
    }
    const detail::Panel worst = heap.top();
    if (worst.depth >= opt.max_depth || static_cast<int>(heap.size()) >= opt.max_segments) {
      resum();
      throw ConvergenceFailure("integrate: error estimate " + std::to_string(error) +
                                   " above tolerance after " + std::to_string(heap.size()) +
                                   " panels",
                               opt.rel_tol);
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::apply_rule(f, worst.a, mid, worst.depth + 1);
    auto right = detail::apply_rule(f, mid, worst.b, worst.depth + 1);
    evals += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (++since_resum == 256) {
      resum();
      since_resum = 0;
    }
  }
  return Result{value, error, evals, static_cast<int>(heap.size())};
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  const std::array<double, 2> pts = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

}  // namespace hypgaf::quad
