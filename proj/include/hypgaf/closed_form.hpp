#pragma once

// Exact values of I_L(r) for integer L by residues on the unit circle.
//
// For integer L the substitution z = e^{it} turns I_L(r) into a contour
// integral whose poles inside the disc are r^2 and, for every nontrivial
// L-th root of unity w, the inner root of
//
//   (z - 1)^2 = ((1 - w)(1 - r^2)^2 / r^2) z,                    (*)
//
// obtained by expanding (1 - r^2 z)(z - r^2) - w z (1 - r^2)^2.
//
// The roots of (*) multiply to 1, so exactly one lies inside the disc.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hypgaf/error.hpp"
#include "hypgaf/model.hpp"

namespace hypgaf::closed_form {

using complex = std::complex<double>;

struct RootPair {
  complex omega;
  complex z_in;
  complex z_out;
};

inline constexpr int kMaxResidueIntensity = 64;

namespace detail {

inline void require_radius(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("closed form: r must lie in (0, 1)");
}

inline bool is_positive_integer(double L) {
  return L >= 1.0 && std::floor(L) == L && L <= 1e9;
}

}  // namespace detail

inline double I_closed_1(double r) {
  detail::require_radius(r);
  const double a = (1.0 - r) * (1.0 + r);
  const double r2 = r * r;
  return 2.0 * std::numbers::pi * a / (r2 * (1.0 + r2));
}

inline double I_closed_2(double r) {
  detail::require_radius(r);
  const double a = (1.0 - r) * (1.0 + r);
  const double r2 = r * r;
  return 2.0 * std::numbers::pi * a / r2 *
         (1.0 / (1.0 + r2) - 0.5 / std::sqrt(1.0 + r2 * r2));
}

// Roots of (*) for w = exp(2 pi i k / L). Solved in w = z - 1, where (*)
// reads w^2 - b w - b = 0: the larger root first, its partner from the
// product -b, then z_in as the reciprocal of the outer root.
inline RootPair root_pair(int k, int L, double r) {
  detail::require_radius(r);
  const double phi = 2.0 * std::numbers::pi * k / L;
  const complex omega = std::polar(1.0, phi);
  const double sh = std::sin(0.5 * phi);
  const complex one_minus_omega(2.0 * sh * sh, -std::sin(phi));
  const double a = (1.0 - r) * (1.0 + r);
  const complex b = one_minus_omega * (a * a / (r * r));

  const complex disc = std::sqrt(b * b + 4.0 * b);
  const complex w_plus = 0.5 * (b + disc);
  const complex w_minus = 0.5 * (b - disc);
  const complex w_big = std::abs(w_plus) >= std::abs(w_minus) ? w_plus : w_minus;
  const complex w_small = -b / w_big;

  complex z1 = 1.0 + w_big;
  complex z2 = 1.0 + w_small;
  if (std::abs(z1) < std::abs(z2)) std::swap(z1, z2);
  const complex z_in = 1.0 / z1;
  const double m = std::abs(z_in);
  if (m >= 1.0 - 1e-9) {
    throw NumericalInstability("root_pair: inner root within 1e-9 of the unit circle");
  }
  return {omega, z_in, z1};
}

inline std::vector<RootPair> root_pairs(int L, double r) {
  std::vector<RootPair> out;
  out.reserve(L > 0 ? L - 1 : 0);
  for (int k = 1; k < L; ++k) out.push_back(root_pair(k, L, r));
  return out;
}

// I_L(r) = 2 pi ( a / (r^2 (1 + r^2)) - sum_w R_w ),  a = 1 - r^2, with
//
//   R_w = a^{2L-2} z^{L-2} / ((-r^2)^L w (z - z_w^out)
//         prod_{v != w} (z - z_v^in)(z - z_v^out)),   z = z_w^in.
//
// For L > 8 the product is carried as log-modulus plus phase.
inline double residue_I(int L, double r) {
  detail::require_radius(r);
  if (L < 1) throw DomainError("residue_I: L must be a positive integer");
  if (L > kMaxResidueIntensity) throw DomainError("residue_I: L above 64; use quadrature");

  const double a = (1.0 - r) * (1.0 + r);
  const double r2 = r * r;
  const double pole_r2 = a / (r2 * (1.0 + r2));
  if (L == 1) return 2.0 * std::numbers::pi * pole_r2;

  const auto pairs = root_pairs(L, r);
  const bool log_domain = L > 8;
  complex sum = 0.0;
  double magnitude = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const complex z = pairs[k].z_in;
    complex residue;
    if (!log_domain) {
      complex den = std::pow(-r2, L) * pairs[k].omega * (z - pairs[k].z_out);
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (j == k) continue;
        den *= (z - pairs[j].z_in) * (z - pairs[j].z_out);
      }
      residue = std::pow(a, 2 * L - 2) * std::pow(z, L - 2) / den;
    } else {
      // log|R| and arg R accumulated separately
      double log_mod = (2.0 * L - 2.0) * std::log(a) + (L - 2.0) * std::log(std::abs(z)) -
                       2.0 * L * std::log(r);
      double arg = (L - 2.0) * std::arg(z) - L * std::numbers::pi - std::arg(pairs[k].omega);
      auto divide_by = [&](complex f) {
        log_mod -= std::log(std::abs(f));
        arg -= std::arg(f);
      };
      divide_by(z - pairs[k].z_out);
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (j == k) continue;
        divide_by(z - pairs[j].z_in);
        divide_by(z - pairs[j].z_out);
      }
      residue = std::polar(std::exp(log_mod), std::remainder(arg, 2.0 * std::numbers::pi));
    }
    sum += residue;
    magnitude += std::abs(residue);
  }
  if (std::abs(sum.imag()) > 1e-10 * std::max(magnitude, std::abs(sum))) {
    throw NumericalInstability("residue_I: residue sum is not real");
  }
  return 2.0 * std::numbers::pi * (pole_r2 - sum.real());
}

// V[n_L(r)] for integer L: printed closed forms for L = 1, 2 and the
// residue sum otherwise.
inline VarianceReport variance_closed(const ModelParams& p) {
  p.validate();
  if (!detail::is_positive_integer(p.L)) {
    throw UnsupportedIntensity("variance_closed: L must be a positive integer");
  }
  const double r2 = p.r * p.r;
  const double a = p.one_minus_r2();
  VarianceReport rep;
  rep.params = p;
  rep.mean = expected_count(p);
  rep.regime = classify_regime(p);
  rep.err_est = 0.0;
  if (p.L == 1.0) {
    rep.variance = r2 / (a * (1.0 + r2));
    rep.method = Method::closed;
  } else if (p.L == 2.0) {
    rep.variance = 4.0 * r2 / a * (1.0 / (1.0 + r2) - 0.5 / std::sqrt(1.0 + r2 * r2));
    rep.method = Method::closed;
  } else {
    if (p.L > kMaxResidueIntensity) {
      throw UnsupportedIntensity("variance_closed: residue route limited to L <= 64");
    }
    rep.variance = variance_prefactor(p) * residue_I(static_cast<int>(p.L), p.r);
    rep.method = Method::residue;
    rep.err_est.reset();
  }
  return rep;
}

}  // namespace hypgaf::closed_form
