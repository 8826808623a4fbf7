#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "hypgaf/error.hpp"

namespace hypgaf {

// Intensity L and radius r of the centered disc D(0, r).
struct ModelParams {
  double L = 1.0;
  double r = 0.5;

  void validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("ModelParams: L must be positive");
    if (!(r > 0.0 && r < 1.0)) throw DomainError("ModelParams: r must lie in (0, 1)");
  }
  // exact for r >= 1/2
  double one_minus_r() const { return 1.0 - r; }
  double one_minus_r2() const { return (1.0 - r) * (1.0 + r); }
};

// Largest radius accepted by the quadrature route.
inline constexpr double kMaxQuadRadius = 1.0 - 1e-12;

enum class QuadForm { theta, x };

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_depth = 60;
  QuadForm form = QuadForm::theta;

  void validate() const {
    if (!(rel_tol > 0.0)) throw DomainError("QuadConfig: rel_tol must be positive");
    if (max_depth < 1) throw DomainError("QuadConfig: max_depth must be >= 1");
  }
};

enum class Method { quad, closed, residue, asymptotic, crossover, mc };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::quad: return "quad";
    case Method::closed: return "closed";
    case Method::residue: return "residue";
    case Method::asymptotic: return "asymptotic";
    case Method::crossover: return "crossover";
    case Method::mc: return "mc";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::quad, Method::closed, Method::residue, Method::asymptotic,
                   Method::crossover, Method::mc}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

enum class Phase { supercritical, critical, subcritical };

enum class RegimeTag {
  supercritical,
  critical,
  subcritical,
  large_L,
  near_half_plus,
  near_half_minus,
  small_L,
};

inline std::string_view to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::supercritical: return "supercritical";
    case RegimeTag::critical: return "critical";
    case RegimeTag::subcritical: return "subcritical";
    case RegimeTag::large_L: return "large_L";
    case RegimeTag::near_half_plus: return "near_half_plus";
    case RegimeTag::near_half_minus: return "near_half_minus";
    case RegimeTag::small_L: return "small_L";
  }
  return "?";
}

// phase is the L = 1/2 trichotomy; tag refines it with the auxiliary
// asymptotic regimes when one applies.
struct Regime {
  Phase phase = Phase::supercritical;
  RegimeTag tag = RegimeTag::supercritical;
};

struct RegimeBands {
  double critical = 1e-12;     // |L - 1/2| at or below this is critical
  double near_half = 0.1;      // |L - 1/2| up to this is near_half_*
  double large_L = 100.0;
  double small_L = 0.1;
  double small_L_ratio = 10.0; // minimum L / (1 - r) for small_L
};

inline Regime classify_regime(const ModelParams& p, const RegimeBands& bands = {}) {
  Regime reg;
  const double offset = p.L - 0.5;
  if (offset > bands.critical) {
    reg.phase = Phase::supercritical;
    reg.tag = RegimeTag::supercritical;
  } else if (offset < -bands.critical) {
    reg.phase = Phase::subcritical;
    reg.tag = RegimeTag::subcritical;
  } else {
    reg.phase = Phase::critical;
    reg.tag = RegimeTag::critical;
    return reg;
  }
  if (p.L >= bands.large_L) {
    reg.tag = RegimeTag::large_L;
  } else if (p.L <= bands.small_L && p.L / p.one_minus_r() >= bands.small_L_ratio) {
    reg.tag = RegimeTag::small_L;
  } else if (std::abs(offset) <= bands.near_half) {
    reg.tag = offset > 0 ? RegimeTag::near_half_plus : RegimeTag::near_half_minus;
  }
  return reg;
}

struct VarianceReport {
  ModelParams params;
  double mean = 0.0;      // E[n_L(r)]
  double variance = 0.0;  // V[n_L(r)]
  Method method = Method::quad;
  Regime regime;
  std::optional<double> err_est;  // absolute, on the variance; unset for asymptotic laws
};

// E[n_L(r)] = L r^2 / (1 - r^2)
inline double expected_count(const ModelParams& p) {
  p.validate();
  return p.L * p.r * p.r / p.one_minus_r2();
}

// V[n_L(r)] = variance_prefactor(p) * I_L(r)
inline double variance_prefactor(const ModelParams& p) {
  const double a = p.one_minus_r2();
  const double r2 = p.r * p.r;
  return p.L * p.L * r2 * r2 / (2.0 * std::numbers::pi * a * a);
}

}  // namespace hypgaf
