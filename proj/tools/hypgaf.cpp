// hypgaf: variance of zero counts of the hyperbolic GAF in a centered disc.
//
//   hypgaf variance --L 1 --r 0.5 --method closed
//   hypgaf sweep --L 0.25,0.5,1 --r-grid 1..5 --methods quad --output out.csv
//   hypgaf simulate --L 1 --r 0.6 --samples 4000 --seed 7
//   hypgaf selftest [--fast]
//
// Exit codes: 0 success, 1 selftest failure, 2 usage, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hypgaf/acceptance.hpp"
#include "hypgaf/records.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

hypgaf::Method method_or_throw(const std::string& s) {
  const auto m = hypgaf::parse_method(s);
  if (!m) throw UsageError("unknown method '" + s + "'");
  return *m;
}

hypgaf::QuadForm form_or_throw(const std::string& s) {
  if (s == "theta") return hypgaf::QuadForm::theta;
  if (s == "x") return hypgaf::QuadForm::x;
  throw UsageError("unknown quadrature form '" + s + "' (theta or x)");
}

// "a..b" -> r = 1 - 10^{-k}, k = a..b
std::vector<double> parse_r_grid(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw UsageError("--r-grid expects K1..K2");
  try {
    return hypgaf::one_minus_pow10_grid(std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2)));
  } catch (const std::logic_error&) {
    throw UsageError("--r-grid expects integers K1..K2 with 1 <= K1 <= K2 <= 15");
  }
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out << content;
    if (!out.flush()) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to " + tmp + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

struct Args {
  // variance / simulate
  double L = 1.0;
  double r = 0.5;
  std::string method = "quad";
  double rel_tol = 1e-10;
  std::string form = "theta";
  std::string format = "json";
  // sweep
  std::vector<double> L_values;
  std::vector<double> r_values;
  std::string r_grid;
  std::vector<std::string> methods;
  std::string output;
  // simulate
  int samples = 4000;
  std::uint64_t seed = 7;
  double trunc_eps = 1e-12;
  // shared
  int threads = 1;
  // selftest
  bool fast = false;
  std::string fault = "none";
};

hypgaf::EvalOptions eval_options(const Args& a) {
  hypgaf::EvalOptions opt;
  opt.quad.rel_tol = a.rel_tol;
  opt.quad.form = form_or_throw(a.form);
  opt.mc.samples = a.samples;
  opt.mc.seed = a.seed;
  opt.mc.trunc_eps = a.trunc_eps;
  opt.mc.threads = a.threads;
  return opt;
}

int cmd_variance(const Args& a) {
  const auto rec = hypgaf::evaluate({a.L, a.r}, method_or_throw(a.method), eval_options(a));
  if (a.format == "csv") {
    std::cout << hypgaf::to_csv({rec});
  } else {
    std::cout << hypgaf::to_json(rec).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const Args& a) {
  hypgaf::SweepSpec spec;
  spec.L_values = a.L_values;
  spec.r_values = a.r_values;
  if (!a.r_grid.empty()) {
    const auto grid = parse_r_grid(a.r_grid);
    spec.r_values.insert(spec.r_values.end(), grid.begin(), grid.end());
  }
  for (const auto& m : a.methods) spec.methods.push_back(method_or_throw(m));
  spec.output_path = a.output;
  spec.format = a.format == "csv" ? hypgaf::OutputFormat::csv : hypgaf::OutputFormat::json;
  if (spec.methods.empty()) throw UsageError("sweep: empty method list");
  if (spec.L_values.empty() || spec.r_values.empty()) throw UsageError("sweep: empty grid");

  const auto rows = hypgaf::run_sweep(spec, eval_options(a), a.threads);
  const std::string text = spec.format == hypgaf::OutputFormat::csv
                               ? hypgaf::to_csv(rows)
                               : hypgaf::to_json(rows).dump(2) + "\n";
  if (spec.output_path.empty()) {
    std::cout << text;
  } else {
    write_atomically(spec.output_path, text);
  }
  return kExitOk;
}

int cmd_simulate(const Args& a) {
  hypgaf::mc::McConfig cfg;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  cfg.trunc_eps = a.trunc_eps;
  cfg.threads = a.threads;
  const auto s = hypgaf::mc::mc_estimate({a.L, a.r}, cfg);
  std::cout << hypgaf::to_json(s).dump(2) << '\n';
  return kExitOk;
}

int cmd_selftest(const Args& a) {
  hypgaf::acceptance::Fault fault = hypgaf::acceptance::Fault::none;
  if (a.fault == "c-prefactor") {
    fault = hypgaf::acceptance::Fault::c_prefactor;
  } else if (a.fault != "none") {
    throw UsageError("unknown fault '" + a.fault + "'");
  }
  const auto subject = hypgaf::acceptance::with_fault(hypgaf::acceptance::Subject::library(), fault);
  hypgaf::acceptance::Options opt;
  opt.fast = a.fast;
  opt.threads = a.threads;
  opt.seed = a.seed;
  bool ok = true;
  // run one check at a time so progress is visible
  using namespace hypgaf::acceptance;
  const std::vector<std::function<CheckResult()>> checks = {
      [&] { return check_closed_vs_quad(subject); }, [&] { return check_residue(subject); },
      [&] { return check_c_dual_forms(subject); },   [&] { return check_supercritical(subject); },
      [&] { return check_subcritical(subject); },    [&] { return check_critical(subject); },
      [&] { return check_large_L(subject); },        [&] { return check_crossover(subject); },
      [&] { return check_monte_carlo(subject, opt); },
      [&] { return check_determinism(subject, opt); }};
  for (const auto& run : checks) {
    const auto res = run();
    ok = ok && res.pass;
    std::cout << format_line(res) << std::endl;
  }
  std::cout << (ok ? "selftest: all checks passed" : "selftest: FAILED") << '\n';
  return ok ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance of zero counts of the hyperbolic Gaussian analytic function"};
  app.require_subcommand(1);
  Args a;

  // HYPGAF_THREADS sets the default; --threads wins
  if (const char* env = std::getenv("HYPGAF_THREADS")) {
    try {
      std::size_t used = 0;
      a.threads = std::stoi(env, &used);
      if (used != std::string(env).size() || a.threads < 1 || a.threads > 1024) {
        throw std::invalid_argument(env);
      }
    } catch (const std::logic_error&) {
      std::cerr << "usage error: HYPGAF_THREADS must be an integer in [1, 1024]\n";
      return kExitUsage;
    }
  }
  auto add_threads = [&a](CLI::App* sub) {
    sub->add_option("--threads", a.threads, "worker threads (default: HYPGAF_THREADS or 1)")
        ->check(CLI::Range(1, 1024));
  };

  auto* var = app.add_subcommand("variance", "one evaluation of E and V of the zero count");
  var->add_option("--L", a.L, "intensity L > 0")->required();
  var->add_option("--r", a.r, "radius 0 < r < 1")->required();
  var->add_option("--method", a.method, "quad|closed|residue|asymptotic|crossover|mc");
  var->add_option("--rel-tol", a.rel_tol, "quadrature relative tolerance");
  var->add_option("--form", a.form, "quadrature variable: theta|x");
  var->add_option("--format", a.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  var->add_option("--samples", a.samples, "Monte Carlo samples");
  var->add_option("--seed", a.seed, "Monte Carlo seed");
  add_threads(var);

  auto* sweep = app.add_subcommand("sweep", "table over an (L, r, method) grid");
  sweep->add_option("--L", a.L_values, "intensities, comma separated")->delimiter(',')->required();
  sweep->add_option("--r", a.r_values, "radii, comma separated")->delimiter(',');
  sweep->add_option("--r-grid", a.r_grid, "K1..K2 for r = 1 - 10^-k, k = K1..K2");
  sweep->add_option("--methods", a.methods, "methods, comma separated")->delimiter(',');
  sweep->add_option("--output", a.output, "output file (default stdout)");
  a.format = "csv";
  sweep->add_option("--format", a.format, "csv|json")->check(CLI::IsMember({"json", "csv"}));
  sweep->add_option("--rel-tol", a.rel_tol, "quadrature relative tolerance");
  sweep->add_option("--form", a.form, "quadrature variable: theta|x");
  sweep->add_option("--samples", a.samples, "Monte Carlo samples per cell");
  sweep->add_option("--seed", a.seed, "Monte Carlo seed");
  add_threads(sweep);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of E and V of the zero count");
  sim->add_option("--L", a.L, "intensity L > 0")->required();
  sim->add_option("--r", a.r, "radius 0 < r < 1")->required();
  sim->add_option("--samples", a.samples, "number of samples");
  sim->add_option("--seed", a.seed, "seed");
  sim->add_option("--trunc-eps", a.trunc_eps, "relative kernel tail left out by truncation");
  add_threads(sim);

  auto* self = app.add_subcommand("selftest", "run the cross-method acceptance battery");
  self->add_flag("--fast", a.fast, "smaller Monte Carlo runs");
  self->add_option("--seed", a.seed, "Monte Carlo seed");
  self->add_option("--inject-fault", a.fault, "none|c-prefactor")->group("");
  add_threads(self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  // variance defaults to JSON, sweep to CSV
  if (var->parsed() && var->count("--format") == 0) a.format = "json";

  try {
    if (var->parsed()) return cmd_variance(a);
    if (sweep->parsed()) return cmd_sweep(a);
    if (sim->parsed()) return cmd_simulate(a);
    if (self->parsed()) return cmd_selftest(a);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hypgaf::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hypgaf::ConvergenceFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (tolerance "
              << hypgaf::format_double(e.tolerance()) << ")\n";
    return kExitNumerical;
  } catch (const hypgaf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
