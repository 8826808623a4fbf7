#pragma once

// Cross-method oracle battery. Each check compares two independent routes
// (or a route against a closed-form limit) and reports one line.
//
// The routes are reached through a Subject so a deliberately broken one can
// be substituted to confirm that the battery notices.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hypgaf/asymptotics.hpp"
#include "hypgaf/closed_form.hpp"
#include "hypgaf/gaf_mc.hpp"
#include "hypgaf/model.hpp"
#include "hypgaf/records.hpp"
#include "hypgaf/specfun.hpp"
#include "hypgaf/variance_quad.hpp"

namespace hypgaf::acceptance {

struct Subject {
  std::function<double(const ModelParams&)> quad_variance;
  std::function<double(const ModelParams&, QuadForm)> quad_I;
  std::function<double(int, double)> residue_I;
  std::function<double(const ModelParams&)> closed_variance;
  std::function<double(double)> c_series;
  std::function<double(double)> c_integral;
  std::function<double(double)> c_subcritical;
  std::function<double(const ModelParams&, asymptotics::CrossoverBranch)> crossover;
  std::function<mc::McSummary(const ModelParams&, const mc::McConfig&)> mc;

  static Subject library() {
    Subject s;
    s.quad_variance = [](const ModelParams& p) { return variance(p).variance; };
    s.quad_I = [](const ModelParams& p, QuadForm f) {
      QuadConfig cfg;
      cfg.form = f;
      return compute_I(p, cfg).value;
    };
    s.residue_I = [](int L, double r) { return closed_form::residue_I(L, r); };
    s.closed_variance = [](const ModelParams& p) {
      return closed_form::variance_closed(p).variance;
    };
    s.c_series = [](double L) { return asymptotics::c_supercritical_series(L).c; };
    s.c_integral = [](double L) { return asymptotics::c_supercritical_integral(L).c; };
    s.c_subcritical = [](double L) { return asymptotics::c_subcritical(L).c; };
    s.crossover = [](const ModelParams& p, asymptotics::CrossoverBranch b) {
      return asymptotics::crossover_variance(p, b).variance;
    };
    s.mc = [](const ModelParams& p, const mc::McConfig& cfg) { return mc::mc_estimate(p, cfg); };
    return s;
  }
};

// Known faults for exercising the battery.
enum class Fault { none, c_prefactor };

inline Subject with_fault(Subject s, Fault f) {
  if (f == Fault::c_prefactor) {
    // L^2/2 in place of L^2/4
    auto good = s.c_series;
    s.c_series = [good](double L) { return 2.0 * good(L); };
  }
  return s;
}

struct Options {
  bool fast = false;  // smaller determinism run
  int threads = 1;
  std::uint64_t seed = 7;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline bool monotone(const std::vector<double>& v) {
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] > v[i - 1];
    down = down && v[i] < v[i - 1];
  }
  return up || down;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.6g", x);
  return s;
}

// Runs `body` and turns an escaping exception into a failed check.
template <class Body>
CheckResult guarded(int id, std::string name, Body body) {
  CheckResult res{id, std::move(name), false, ""};
  try {
    body(res);
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = std::string("exception: ") + e.what();
  }
  return res;
}

}  // namespace detail

inline CheckResult check_closed_vs_quad(const Subject& s) {
  return detail::guarded(1, "closed form vs quadrature (L=1,2)", [&](CheckResult& res) {
    double worst = 0.0;
    for (double L : {1.0, 2.0}) {
      for (double r : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const ModelParams p{L, r};
        worst = std::max(worst, detail::rel_err(s.quad_variance(p), s.closed_variance(p)));
      }
    }
    // L = 1 against r^2 / (1 - r^4) directly
    for (double r : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      const double exact = r * r / ((1.0 - r * r) * (1.0 + r * r));
      worst = std::max(worst, detail::rel_err(s.quad_variance({1.0, r}), exact));
    }
    res.pass = worst <= 1e-9;
    res.detail = "max rel err " + detail::fmt("%.3g", worst) + " (tol 1e-9)";
  });
}

inline CheckResult check_residue(const Subject& s) {
  return detail::guarded(2, "residue engine vs quadrature (L=3..8)", [&](CheckResult& res) {
    double worst = 0.0;
    for (int L = 3; L <= 8; ++L) {
      for (double r : {0.3, 0.6, 0.9}) {
        const double q = s.quad_I({static_cast<double>(L), r}, QuadForm::theta);
        worst = std::max(worst, detail::rel_err(s.residue_I(L, r), q));
      }
    }
    res.pass = worst <= 1e-8;
    res.detail = "max rel err " + detail::fmt("%.3g", worst) + " (tol 1e-8)";
  });
}

inline CheckResult check_c_dual_forms(const Subject& s) {
  return detail::guarded(3, "c_L series vs integral, c_1 and c_2", [&](CheckResult& res) {
    double worst = 0.0;
    for (double L : {0.6, 0.75, 1.0, 1.5, 2.0, 5.0, 20.0}) {
      worst = std::max(worst, detail::rel_err(s.c_series(L), s.c_integral(L)));
    }
    const double c1 = s.c_series(1.0);
    const double c2 = s.c_series(2.0);
    const bool ok_dual = worst <= 1e-8;
    const bool ok_c1 = std::abs(c1 - 0.25) <= 1e-8;
    const bool ok_c2 = std::abs(c2 - (1.0 - 1.0 / std::numbers::sqrt2)) <= 1e-8;
    res.pass = ok_dual && ok_c1 && ok_c2;
    res.detail = "series/integral max rel err " + detail::fmt("%.3g", worst);
    if (!ok_c1) res.detail += "; c_1=0.25 check failed: c_1 = " + detail::fmt("%.17g", c1);
    if (!ok_c2) res.detail += "; c_2=1-1/sqrt2 check failed: c_2 = " + detail::fmt("%.17g", c2);
  });
}

inline CheckResult check_supercritical(const Subject& s) {
  return detail::guarded(4, "supercritical law V(1-r)/c_L", [&](CheckResult& res) {
    bool ok = true;
    std::string d;
    for (double L : {0.75, 1.0, 2.0}) {
      const double c = s.c_series(L);
      std::vector<double> ratios;
      for (int k = 2; k <= 6; ++k) {
        const double g = std::pow(10.0, -k);
        ratios.push_back(s.quad_variance({L, 1.0 - g}) * g / c);
      }
      const double last = ratios.back();
      const bool in_band = last >= 0.99 && last <= 1.01;
      const bool mono = detail::monotone(ratios);
      ok = ok && in_band && mono;
      d += (d.empty() ? "" : "; ") + detail::fmt("L=%g: ", L) + detail::join(ratios) +
           (mono ? "" : " (not monotone)");
    }
    res.pass = ok;
    res.detail = d + " (k=2..6, band [0.99,1.01] at k=6)";
  });
}

inline CheckResult check_subcritical(const Subject& s) {
  return detail::guarded(5, "subcritical law V(1-r)^(2-2L)/c_L", [&](CheckResult& res) {
    bool ok = true;
    std::string d;
    const double g = 1e-6;
    for (double L : {0.25, 0.4}) {
      const double ratio =
          s.quad_variance({L, 1.0 - g}) * std::pow(g, 2.0 - 2.0 * L) / s.c_subcritical(L);
      ok = ok && ratio >= 0.98 && ratio <= 1.02;
      d += (d.empty() ? "" : "; ") + detail::fmt("L=%g: ", L) + detail::fmt("%.6g", ratio);
    }
    res.pass = ok;
    res.detail = d + " (band [0.98,1.02] at 1-r=1e-6)";
  });
}

// The ratio approaches 1 from above; the check is monotone approach to 1.
inline CheckResult check_critical(const Subject& s) {
  return detail::guarded(6, "critical log law I_1/2 / (4(1-r)log(1/(1-r)))", [&](CheckResult& res) {
    std::vector<double> ratios;
    std::vector<double> gaps;
    for (int k = 2; k <= 8; ++k) {
      const double g = std::pow(10.0, -k);
      const double ratio = s.quad_I({0.5, 1.0 - g}, QuadForm::x) / (4.0 * g * -std::log(g));
      ratios.push_back(ratio);
      gaps.push_back(std::abs(ratio - 1.0));
    }
    bool toward_one = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) toward_one = toward_one && gaps[i] < gaps[i - 1];
    const bool floor_ok = ratios.back() >= 0.85;
    res.pass = toward_one && floor_ok;
    res.detail = detail::join(ratios) + " (k=2..8; |ratio-1| decreasing" +
                 (toward_one ? "" : " FAILED") + ", >= 0.85 at k=8" + (floor_ok ? "" : " FAILED") +
                 ")";
  });
}

inline CheckResult check_large_L(const Subject& s) {
  return detail::guarded(7, "large-L law c_L/sqrt(L) -> zeta(3/2)/(8 sqrt(pi))", [&](CheckResult& res) {
    const double limit =
        specfun::zeta_three_halves() / (8.0 * std::sqrt(std::numbers::pi));
    const double e3 = detail::rel_err(s.c_series(1e3) / std::sqrt(1e3), limit);
    const double e5 = detail::rel_err(s.c_series(1e5) / std::sqrt(1e5), limit);
    res.pass = e3 <= 1e-2 && e5 <= 1e-3;
    res.detail = "rel dev " + detail::fmt("%.3g", e3) + " at L=1e3 (tol 1e-2), " +
                 detail::fmt("%.3g", e5) + " at L=1e5 (tol 1e-3)";
  });
}

inline CheckResult check_crossover(const Subject& s) {
  using asymptotics::CrossoverBranch;
  return detail::guarded(8, "crossover laws vs quadrature, b/c seam", [&](CheckResult& res) {
    struct Case {
      double L;
      CrossoverBranch branch;
      const char* label;
    };
    const double r = 1.0 - 1e-3;
    bool ok = true;
    std::string d;
    for (const Case& c : {Case{0.55, CrossoverBranch::near_half_plus, "(b) L=0.55"},
                          Case{0.45, CrossoverBranch::near_half_minus, "(c) L=0.45"},
                          Case{0.05, CrossoverBranch::small_L, "(d) L=0.05"}}) {
      const ModelParams p{c.L, r};
      const double ratio = s.crossover(p, c.branch) / s.quad_variance(p);
      const bool within = std::abs(ratio - 1.0) <= 0.15;
      ok = ok && within;
      d += (d.empty() ? "" : "; ") + std::string(c.label) + " ratio " +
           detail::fmt("%.4g", ratio) + (within ? "" : " OUT");
    }
    double seam = 0.0;
    for (double rr : {0.9, 0.999, 1.0 - 1e-6}) {
      const double plus = s.crossover({0.5 + 1e-9, rr}, CrossoverBranch::near_half_plus);
      const double minus = s.crossover({0.5 - 1e-9, rr}, CrossoverBranch::near_half_minus);
      seam = std::max(seam, detail::rel_err(plus, minus));
    }
    const bool seam_ok = seam <= 1e-6;
    res.pass = ok && seam_ok;
    res.detail = d + " (tol 15%); seam rel gap " + detail::fmt("%.3g", seam) + " (tol 1e-6)";
  });
}

inline CheckResult check_monte_carlo(const Subject& s, const Options& opt) {
  return detail::guarded(9, "Monte Carlo CIs vs theory", [&](CheckResult& res) {
    // the sample size is part of the criterion; --fast does not shrink it
    mc::McConfig cfg;
    cfg.samples = 4000;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    bool ok = true;
    std::string d;
    for (double L : {1.0, 2.0, 0.7}) {
      const ModelParams p{L, 0.6};
      double target = 0.0;
      if (L == 1.0) {
        target = 0.36 / (1.0 - 0.36 * 0.36);
      } else if (L == 2.0) {
        target = s.closed_variance(p);
      } else {
        target = s.quad_variance(p);
      }
      const auto m = s.mc(p, cfg);
      const bool mean_ok = m.mean_ci_95.contains(expected_count(p));
      const bool var_ok = m.var_ci_95.contains(target);
      ok = ok && mean_ok && var_ok;
      d += (d.empty() ? "" : "; ") + detail::fmt("L=%g ", L) + "mean " +
           detail::fmt("%.4f", m.mean_hat) + (mean_ok ? "" : " MISS") + " var " +
           detail::fmt("%.4f", m.var_hat) + " vs " + detail::fmt("%.4f", target) +
           (var_ok ? "" : " MISS");
    }
    res.pass = ok;
    res.detail = d + detail::fmt(" (n=%g, r=0.6)", cfg.samples);
  });
}

inline CheckResult check_determinism(const Subject& s, const Options& opt) {
  return detail::guarded(10, "Monte Carlo determinism across 1 and 8 threads", [&](CheckResult& res) {
    mc::McConfig cfg;
    cfg.samples = opt.fast ? 500 : 4000;
    cfg.seed = opt.seed;
    const ModelParams p{2.0, 0.6};
    cfg.threads = 1;
    const std::string one = to_json(s.mc(p, cfg)).dump();
    cfg.threads = 8;
    const std::string eight = to_json(s.mc(p, cfg)).dump();
    res.pass = one == eight;
    res.detail = res.pass ? "summary JSON byte-identical" : "summaries differ";
  });
}

inline std::vector<CheckResult> run_all(const Subject& s, const Options& opt = {}) {
  return {check_closed_vs_quad(s), check_residue(s),      check_c_dual_forms(s),
          check_supercritical(s),  check_subcritical(s),  check_critical(s),
          check_large_L(s),        check_crossover(s),    check_monte_carlo(s, opt),
          check_determinism(s, opt)};
}

inline std::string format_line(const CheckResult& c) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  ", c.pass ? "PASS" : "FAIL", c.id);
  return head + c.name + ": " + c.detail;
}

inline bool all_pass(const std::vector<CheckResult>& v) {
  for (const auto& c : v) {
    if (!c.pass) return false;
  }
  return true;
}

}  // namespace hypgaf::acceptance
