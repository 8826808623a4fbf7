#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hypgaf/closed_form.hpp"
#include "hypgaf/gaf_mc.hpp"
#include "hypgaf/records.hpp"
#include "hypgaf/variance_quad.hpp"

using namespace hypgaf;
using namespace hypgaf::mc;

TEST(LogCoeffWeight, Values) {
  for (int n : {0, 1, 7, 1000}) EXPECT_EQ(log_coeff_weight(1.0, n), 0.0);
  EXPECT_NEAR(log_coeff_weight(2.0, 3), std::log(2.0), 1e-15);
  EXPECT_NEAR(log_coeff_weight(0.5, 2), 0.5 * std::log(3.0 / 8.0), 1e-14);
  EXPECT_THROW(log_coeff_weight(1.0, -1), DomainError);
}

TEST(TruncationOrder, GeometricCase) {
  EXPECT_EQ(truncation_order({1.0, 0.9}, 1e-12), 131);
  EXPECT_EQ(truncation_order({1.0, 0.5}, 1e-12), 19);
  EXPECT_GT(truncation_order({1.0, 0.95}, 1e-12), truncation_order({1.0, 0.9}, 1e-12));
  EXPECT_THROW(truncation_order({1.0, 0.5}, 0.1), DomainError);
}

TEST(TruncationOrder, TailBoundHolds) {
  for (double L : {0.3, 1.0, 2.5, 10.0}) {
    for (double r : {0.3, 0.7, 0.9}) {
      const double eps = 1e-10;
      const int N = truncation_order({L, r}, eps);
      // direct tail sum of binom(L+n-1, n) r^{2n}
      double tail = 0.0;
      for (int n = N + 1; n < N + 20000; ++n) tail += std::exp(2.0 * log_coeff_weight(L, n) + 2.0 * n * std::log(r));
      EXPECT_LE(tail, eps * std::pow(1.0 - r * r, -L)) << "L=" << L << " r=" << r;
      EXPECT_GE(N, 1);
    }
  }
}

TEST(SampleGaf, StandardComplexNormal) {
  auto eng = sample_engine(11, 0);
  double m2 = 0.0;
  std::complex<double> m = 0.0;
  std::complex<double> pseudo = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto a = standard_complex_normal(eng);
    m2 += std::norm(a);
    m += a;
    pseudo += a * a;
  }
  EXPECT_GE(m2 / n, 0.99);
  EXPECT_LE(m2 / n, 1.01);
  EXPECT_LT(std::abs(m / double(n)), 0.015);
  EXPECT_LT(std::abs(pseudo / double(n)), 0.015);
}

TEST(SampleGaf, Reproducible) {
  auto e1 = sample_engine(42, 17);
  auto e2 = sample_engine(42, 17);
  auto e3 = sample_engine(42, 18);
  const auto a = sample_gaf({1.5, 0.7}, 30, e1);
  const auto b = sample_gaf({1.5, 0.7}, 30, e2);
  const auto c = sample_gaf({1.5, 0.7}, 30, e3);
  EXPECT_EQ(a.coeffs, b.coeffs);
  EXPECT_NE(a.coeffs, c.coeffs);
  EXPECT_EQ(a.trunc_order, 30);
  EXPECT_FALSE(a.zero_count.has_value());
  EXPECT_THROW(sample_gaf({1.0, 0.5}, 0, e1), DomainError);
}

TEST(SampleGaf, EmpiricalKernel) {
  // E|f_L(z)|^2 = (1 - |z|^2)^{-L}, within 4 standard errors
  for (double L : {0.5, 1.0, 3.0}) {
    for (std::complex<double> z : {std::complex<double>(0.5, 0.0), std::polar(0.7, 1.0)}) {
      const ModelParams p{L, std::abs(z)};
      const int N = truncation_order(p, 1e-14);
      const auto scales = coefficient_scales(L, N);
      constexpr int draws = 10000;
      double s = 0.0;
      double s2 = 0.0;
      for (int i = 0; i < draws; ++i) {
        auto eng = sample_engine(3, i);
        const auto g = sample_gaf(p, scales, eng);
        const double v = std::norm(evaluate(g.coeffs, z));
        s += v;
        s2 += v * v;
      }
      const double mean = s / draws;
      const double se = std::sqrt((s2 / draws - mean * mean) / draws);
      EXPECT_LE(std::abs(mean - std::pow(1.0 - std::norm(z), -L)), 4.0 * se)
          << "L=" << L << " z=" << z;
    }
  }
}

TEST(CountZeros, Polynomials) {
  const std::vector<complex> cube = {0.0, 0.0, 0.0, 1.0};
  for (double r : {0.1, 0.5, 0.99}) EXPECT_EQ(count_zeros(cube, r), 3);
  const std::vector<complex> lin = {-0.3, 1.0};
  EXPECT_EQ(count_zeros(lin, 0.5), 1);
  EXPECT_EQ(count_zeros(lin, 0.2), 0);
  // (z - 0.4)(z - 0.8)
  const std::vector<complex> quad = {0.32, -1.2, 1.0};
  EXPECT_EQ(count_zeros(quad, 0.6), 1);
  EXPECT_EQ(count_zeros(quad, 0.9), 2);
  EXPECT_EQ(count_zeros(quad, 0.3), 0);
}

TEST(CountZeros, HighDegreeDoesNotAlias) {
  // 200 roots on |z| = 0.5; at 256 points the increments of z^200 wrap to
  // about -1.38 rad and would pass the pi/2 test with a wrong count
  std::vector<complex> c(201, 0.0);
  c[0] = -std::pow(0.5, 200);
  c[200] = 1.0;
  McConfig cfg;
  cfg.circle_points_init = 256;
  EXPECT_EQ(count_zeros(c, 0.6, cfg), 200);
  EXPECT_EQ(count_zeros(c, 0.45, cfg), 0);
}

TEST(CountZeros, BaseGridFollowsDegree) {
  // roots at 0.5 e^{2 pi i k / 40}: the base grid grows to 128 points and
  // the remaining large increments are bisected locally
  std::vector<complex> c(41, 0.0);
  c[0] = -std::pow(0.5, 40);
  c[40] = 1.0;
  McConfig cfg;
  cfg.circle_points_init = 16;
  const auto w = winding_number(c, 0.55, cfg);
  EXPECT_EQ(w.count, 40);
  EXPECT_EQ(w.points, 128);
  EXPECT_GT(w.extra_points, 0);
  EXPECT_EQ(count_zeros(c, 0.45, cfg), 0);
}

TEST(CountZeros, Errors) {
  const std::vector<complex> lin = {-0.3, 1.0};
  McConfig cfg;
  cfg.circle_points_init = 4;
  // root exactly on a sample point
  EXPECT_THROW(count_zeros(lin, 0.3, cfg), CircleTooClose);
  // a root 1e-9 outside the circle needs about 20 bisections
  const std::vector<complex> near = {-std::polar(0.5 + 1e-9, 0.1), 1.0};
  cfg.max_refine = 5;
  EXPECT_THROW(count_zeros(near, 0.5, cfg), RefinementExhausted);
  cfg.max_refine = 40;
  const auto w = winding_number(near, 0.5, cfg);
  EXPECT_EQ(w.count, 0);
  EXPECT_GT(w.extra_points, 0);
  EXPECT_LT(w.extra_points, 200);
  EXPECT_EQ(count_zeros(std::vector<complex>{-std::polar(0.5 - 1e-9, 0.1), 1.0}, 0.5, cfg), 1);
}

TEST(CountZeros, StableUnderDoubling) {
  const ModelParams p{1.3, 0.85};
  const int N = truncation_order(p, 1e-12);
  const auto scales = coefficient_scales(p.L, N);
  McConfig cfg;
  for (int i = 0; i < 100; ++i) {
    auto eng = sample_engine(5, i);
    const auto s = sample_gaf(p, scales, eng);
    const auto w = winding_number(s.coeffs, p.r, cfg);
    McConfig finer = cfg;
    finer.circle_points_init = 2 * w.points;
    EXPECT_EQ(winding_number(s.coeffs, p.r, finer).count, w.count) << "sample " << i;
  }
}

TEST(CountZeros, GlobalPhaseInvariance) {
  const ModelParams p{0.8, 0.8};
  const int N = truncation_order(p, 1e-12);
  for (int i = 0; i < 50; ++i) {
    auto eng = sample_engine(9, i);
    auto s = sample_gaf(p, N, eng);
    const int before = count_zeros(s, p.r);
    for (auto& c : s.coeffs) c *= std::polar(1.0, 2.3);
    EXPECT_EQ(count_zeros(s, p.r), before);
  }
}

TEST(CountZeros, TruncationInsensitive) {
  const ModelParams p{1.0, 0.9};
  const int n_lo = truncation_order(p, 1e-10);
  const int n_hi = truncation_order(p, 1e-14);
  ASSERT_GT(n_hi, n_lo);
  const auto s_hi = coefficient_scales(1.0, n_hi);
  for (int i = 0; i < 200; ++i) {
    auto eng = sample_engine(13, i);
    const auto full = sample_gaf(p, s_hi, eng);
    // the shorter series is a prefix of the same draw
    const std::span<const complex> prefix(full.coeffs.data(), n_lo + 1);
    EXPECT_EQ(count_zeros(prefix, p.r), count_zeros(full, p.r)) << "sample " << i;
  }
}

TEST(Moments, MatchTwoPass) {
  MomentAccumulator acc;
  const std::vector<double> xs = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5};
  for (double x : xs) acc.add(x);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    m2 += (x - mean) * (x - mean);
    m4 += std::pow(x - mean, 4);
  }
  EXPECT_NEAR(acc.mean(), mean, 1e-14);
  EXPECT_NEAR(acc.variance(), m2 / (xs.size() - 1), 1e-13);
  EXPECT_NEAR(acc.central4(), m4 / xs.size(), 1e-12);
}

TEST(McEstimate, L1AgainstTheory) {
  McConfig cfg;
  cfg.threads = 4;
  const auto s = mc_estimate({1.0, 0.6}, cfg);
  EXPECT_EQ(s.n_samples, 4000);
  EXPECT_TRUE(s.mean_ci_95.contains(0.5625));
  EXPECT_TRUE(s.var_ci_95.contains(0.36 / (1.0 - 0.36 * 0.36)));
  EXPECT_TRUE(s.mean_ci_95.contains(s.mean_hat));
  EXPECT_TRUE(s.var_ci_95.contains(s.var_hat));
  EXPECT_FALSE(s.mean_dominated);
}

TEST(McEstimate, L2AgainstClosedForm) {
  McConfig cfg;
  cfg.threads = 4;
  const auto s = mc_estimate({2.0, 0.6}, cfg);
  EXPECT_TRUE(s.mean_ci_95.contains(1.125));
  EXPECT_TRUE(s.var_ci_95.contains(closed_form::variance_closed({2.0, 0.6}).variance));
}

TEST(McEstimate, MeanZTest) {
  // two-sided z-test at level 0.01
  McConfig cfg;
  cfg.samples = 2000;
  cfg.threads = 4;
  for (double L : {0.5, 1.0, 2.0}) {
    for (double r : {0.4, 0.7}) {
      const auto s = mc_estimate({L, r}, cfg);
      const double se = std::sqrt(s.var_hat / s.n_samples);
      EXPECT_LE(std::abs(s.mean_hat - expected_count({L, r})) / se, 2.5758293035489) << L << " " << r;
    }
  }
}

TEST(McEstimate, DeterministicAcrossThreads) {
  McConfig cfg;
  cfg.samples = 600;
  cfg.threads = 1;
  const auto one = to_json(mc_estimate({0.7, 0.75}, cfg)).dump();
  cfg.threads = 8;
  const auto eight = to_json(mc_estimate({0.7, 0.75}, cfg)).dump();
  cfg.threads = 3;
  const auto three = to_json(mc_estimate({0.7, 0.75}, cfg)).dump();
  EXPECT_EQ(one, eight);
  EXPECT_EQ(one, three);
}

TEST(McEstimate, MeanDominatedFlag) {
  McConfig cfg;
  cfg.samples = 50;
  const auto s = mc_estimate({0.1, 0.01}, cfg);
  EXPECT_TRUE(s.mean_dominated);
  EXPECT_EQ(s.mean_hat, 0.0);
}

TEST(McConfig, Validation) {
  McConfig cfg;
  cfg.samples = 1;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.trunc_eps = 0.5;
  EXPECT_THROW(cfg.validate(), DomainError);
}
