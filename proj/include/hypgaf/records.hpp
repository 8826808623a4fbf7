#pragma once

// Tabular output: one RunRecord per (L, r, method) evaluation, the sweep
// runner that produces them, and CSV / JSON serialization.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hypgaf/asymptotics.hpp"
#include "hypgaf/closed_form.hpp"
#include "hypgaf/error.hpp"
#include "hypgaf/gaf_mc.hpp"
#include "hypgaf/model.hpp"
#include "hypgaf/variance_quad.hpp"

namespace hypgaf {

using Json = nlohmann::json;

inline constexpr std::string_view kCsvHeader = "L,r,method,mean,variance,err,regime,ms";

// empty, an absolute error estimate, or a 95% interval (Monte Carlo)
using ErrOrCi = std::variant<std::monostate, double, mc::Interval>;

struct RunRecord {
  double L = 0.0;
  double r = 0.0;
  Method method = Method::quad;
  double expected_count = 0.0;
  double variance = 0.0;
  ErrOrCi err_est_or_ci;
  RegimeTag regime = RegimeTag::supercritical;
  double wall_time_ms = 0.0;

  bool operator==(const RunRecord&) const = default;
};

enum class OutputFormat { csv, json };

struct SweepSpec {
  std::vector<double> L_values;
  std::vector<double> r_values;
  std::vector<Method> methods;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;

  void validate() const {
    if (L_values.empty()) throw DomainError("SweepSpec: L grid is empty");
    if (r_values.empty()) throw DomainError("SweepSpec: r grid is empty");
    if (methods.empty()) throw DomainError("SweepSpec: method list is empty");
    for (double L : L_values) ModelParams{L, 0.5}.validate();
    for (double r : r_values) ModelParams{1.0, r}.validate();
  }
};

struct EvalOptions {
  QuadConfig quad;
  mc::McConfig mc;
};

// r = 1 - 10^{-k} for k = k_lo..k_hi
inline std::vector<double> one_minus_pow10_grid(int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi < k_lo || k_hi > 15) {
    throw DomainError("r grid: need 1 <= k_lo <= k_hi <= 15");
  }
  std::vector<double> out;
  for (int k = k_lo; k <= k_hi; ++k) out.push_back(1.0 - std::pow(10.0, -k));
  return out;
}

// One evaluation. DomainError subclasses signal that the method does not
// apply to (L, r); numerical failures propagate as NumericalError.
inline RunRecord evaluate(const ModelParams& p, Method method, const EvalOptions& opt = {}) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.L = p.L;
  rec.r = p.r;
  rec.method = method;
  rec.regime = classify_regime(p).tag;

  auto take = [&rec](const VarianceReport& rep) {
    rec.method = rep.method;
    rec.expected_count = rep.mean;
    rec.variance = rep.variance;
    if (rep.err_est) rec.err_est_or_ci = *rep.err_est;
  };
  switch (method) {
    case Method::quad:
      take(variance(p, opt.quad));
      break;
    case Method::closed:
      take(closed_form::variance_closed(p));
      break;
    case Method::residue: {
      if (!closed_form::detail::is_positive_integer(p.L)) {
        throw UnsupportedIntensity("residue: L must be a positive integer");
      }
      if (p.L > closed_form::kMaxResidueIntensity) {
        throw UnsupportedIntensity("residue: limited to L <= 64");
      }
      rec.expected_count = expected_count(p);
      rec.variance = variance_prefactor(p) * closed_form::residue_I(static_cast<int>(p.L), p.r);
      break;
    }
    case Method::asymptotic:
      take(asymptotics::asymptotic_variance(p));
      break;
    case Method::crossover:
      take(asymptotics::crossover_variance(p));
      break;
    case Method::mc: {
      const auto s = mc::mc_estimate(p, opt.mc);
      rec.expected_count = s.mean_hat;
      rec.variance = s.var_hat;
      rec.err_est_or_ci = s.var_ci_95;
      break;
    }
  }
  if (!(rec.variance >= 0.0) || !std::isfinite(rec.variance)) {
    throw NumericalInstability("evaluate: variance is negative or not finite");
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

// Rows in L-major, then r, then method order. Cells whose method does not
// apply are left out. Cells run on up to `threads` workers; Monte Carlo
// cells then use one thread each.
inline std::vector<RunRecord> run_sweep(const SweepSpec& spec, const EvalOptions& opt = {},
                                        int threads = 1) {
  spec.validate();
  struct Cell {
    ModelParams p;
    Method m;
  };
  std::vector<Cell> cells;
  for (double L : spec.L_values) {
    for (double r : spec.r_values) {
      for (Method m : spec.methods) cells.push_back({{L, r}, m});
    }
  }
  const int n = static_cast<int>(cells.size());
  const int workers = std::clamp(threads, 1, n);
  EvalOptions cell_opt = opt;
  if (workers > 1) cell_opt.mc.threads = 1;

  std::vector<std::optional<RunRecord>> out(n);
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) {
          try {
            out[i] = evaluate(cells[i].p, cells[i].m, cell_opt);
          } catch (const DomainError&) {
            // inapplicable cell
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  std::vector<RunRecord> rows;
  for (int i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (out[i]) rows.push_back(*out[i]);
  }
  return rows;
}

// %.17g: enough digits to round-trip every double
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_err_cell(const ErrOrCi& e) {
  if (const auto* d = std::get_if<double>(&e)) return format_double(*d);
  if (const auto* ci = std::get_if<mc::Interval>(&e)) {
    return format_double(ci->lo) + ";" + format_double(ci->hi);
  }
  return "";
}

inline std::string to_csv(const std::vector<RunRecord>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.L) + ',' + format_double(r.r) + ',' + std::string(to_string(r.method)) +
           ',' + format_double(r.expected_count) + ',' + format_double(r.variance) + ',' +
           csv_err_cell(r.err_est_or_ci) + ',' + std::string(to_string(r.regime)) + ',' +
           format_double(r.wall_time_ms) + '\n';
  }
  return out;
}

inline std::optional<RegimeTag> parse_regime_tag(std::string_view s) {
  for (RegimeTag t : {RegimeTag::supercritical, RegimeTag::critical, RegimeTag::subcritical,
                      RegimeTag::large_L, RegimeTag::near_half_plus, RegimeTag::near_half_minus,
                      RegimeTag::small_L}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

inline Json interval_json(const mc::Interval& ci) { return Json::array({ci.lo, ci.hi}); }

inline Json to_json(const RunRecord& r) {
  Json j;
  j["L"] = r.L;
  j["r"] = r.r;
  j["method"] = std::string(to_string(r.method));
  j["expected_count"] = r.expected_count;
  j["variance"] = r.variance;
  if (const auto* d = std::get_if<double>(&r.err_est_or_ci)) {
    j["err_est_or_ci"] = *d;
  } else if (const auto* ci = std::get_if<mc::Interval>(&r.err_est_or_ci)) {
    j["err_est_or_ci"] = interval_json(*ci);
  } else {
    j["err_est_or_ci"] = nullptr;
  }
  j["regime"] = std::string(to_string(r.regime));
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline Json to_json(const std::vector<RunRecord>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr;
}

inline RunRecord record_from_json(const Json& j) {
  RunRecord r;
  r.L = j.at("L").get<double>();
  r.r = j.at("r").get<double>();
  const auto m = parse_method(j.at("method").get<std::string>());
  if (!m) throw DomainError("record_from_json: unknown method");
  r.method = *m;
  r.expected_count = j.at("expected_count").get<double>();
  r.variance = j.at("variance").get<double>();
  const Json& e = j.at("err_est_or_ci");
  if (e.is_number()) {
    r.err_est_or_ci = e.get<double>();
  } else if (e.is_array() && e.size() == 2) {
    r.err_est_or_ci = mc::Interval{e[0].get<double>(), e[1].get<double>()};
  } else if (!e.is_null()) {
    throw DomainError("record_from_json: malformed err_est_or_ci");
  }
  const auto tag = parse_regime_tag(j.at("regime").get<std::string>());
  if (!tag) throw DomainError("record_from_json: unknown regime");
  r.regime = *tag;
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

inline std::vector<RunRecord> records_from_json(const Json& j) {
  if (!j.is_array()) throw DomainError("records_from_json: expected an array");
  std::vector<RunRecord> out;
  for (const auto& e : j) out.push_back(record_from_json(e));
  return out;
}

inline Json to_json(const mc::McSummary& s) {
  Json j;
  j["L"] = s.L;
  j["r"] = s.r;
  j["n_samples"] = s.n_samples;
  j["mean_hat"] = s.mean_hat;
  j["var_hat"] = s.var_hat;
  j["mean_ci_95"] = interval_json(s.mean_ci_95);
  j["var_ci_95"] = interval_json(s.var_ci_95);
  j["seed"] = s.seed;
  j["trunc_order"] = s.trunc_order;
  j["mean_dominated"] = s.mean_dominated;
  return j;
}

}  // namespace hypgaf
