#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hypgaf/records.hpp"

using namespace hypgaf;

TEST(Records, CsvHeader) {
  EXPECT_EQ(kCsvHeader, "L,r,method,mean,variance,err,regime,ms");
  EXPECT_EQ(to_csv({}), "L,r,method,mean,variance,err,regime,ms\n");
}

TEST(Records, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  for (double x : {1.0 / 3.0, 2.3553940133682071, 1e-300, 6.02e23}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(Records, EvaluateDispatch) {
  const auto closed = evaluate({1.0, 0.5}, Method::closed);
  EXPECT_NEAR(closed.variance, 0.26666666666666667, 1e-15);
  EXPECT_EQ(closed.method, Method::closed);
  const auto quad = evaluate({1.0, 0.5}, Method::quad);
  EXPECT_NEAR(quad.variance, closed.variance, 1e-10 * closed.variance);
  EXPECT_TRUE(std::holds_alternative<double>(quad.err_est_or_ci));
  // closed falls through to the residue sum for other integers
  EXPECT_EQ(evaluate({3.0, 0.5}, Method::closed).method, Method::residue);
  EXPECT_NEAR(evaluate({3.0, 0.5}, Method::residue).variance, evaluate({3.0, 0.5}, Method::quad).variance, 1e-9);
  EXPECT_NEAR(evaluate({0.25, 0.999}, Method::asymptotic).variance, 824.8, 0.05);
  EXPECT_THROW(evaluate({1.5, 0.5}, Method::closed), UnsupportedIntensity);
  EXPECT_THROW(evaluate({1.0, 0.3}, Method::asymptotic), DomainError);
}

TEST(Records, McRecordCarriesInterval) {
  EvalOptions opt;
  opt.mc.samples = 200;
  const auto rec = evaluate({1.0, 0.5}, Method::mc, opt);
  ASSERT_TRUE(std::holds_alternative<mc::Interval>(rec.err_est_or_ci));
  EXPECT_TRUE(std::get<mc::Interval>(rec.err_est_or_ci).contains(rec.variance));
}

TEST(Records, JsonRoundTrip) {
  SweepSpec spec;
  spec.L_values = {0.5, 1.0, 2.0};
  spec.r_values = {0.3, 0.9};
  spec.methods = {Method::quad, Method::closed, Method::asymptotic, Method::mc};
  EvalOptions opt;
  opt.mc.samples = 100;
  const auto rows = run_sweep(spec, opt, 4);
  ASSERT_FALSE(rows.empty());
  const auto text = to_json(rows).dump();
  EXPECT_EQ(records_from_json(Json::parse(text)), rows);
  for (const auto& row : to_json(rows)) {
    for (const auto& [key, value] : row.items()) EXPECT_FALSE(value.is_object()) << key;
  }
}

TEST(Records, SweepOrderAndSkips) {
  SweepSpec spec;
  spec.L_values = {1.0, 0.5};
  spec.r_values = {0.4, 0.8};
  spec.methods = {Method::closed, Method::quad, Method::asymptotic};
  const auto rows = run_sweep(spec);
  // L=1: r=0.4 {closed, quad}, r=0.8 {closed, quad, asymptotic}; L=0.5: r=0.4 {quad}, r=0.8 {quad, asymptotic}
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].L, 1.0);
  EXPECT_EQ(rows[0].method, Method::closed);
  EXPECT_EQ(rows[1].method, Method::quad);
  EXPECT_EQ(rows[2].r, 0.8);
  EXPECT_EQ(rows[4].method, Method::asymptotic);
  EXPECT_EQ(rows[5].L, 0.5);
  EXPECT_EQ(rows[5].r, 0.4);
  EXPECT_EQ(rows[7].method, Method::asymptotic);
}

TEST(Records, SweepSameAcrossThreadCounts) {
  SweepSpec spec;
  spec.L_values = {0.3, 0.7, 1.0, 3.0};
  spec.r_values = one_minus_pow10_grid(1, 3);
  spec.methods = {Method::quad, Method::crossover};
  auto a = run_sweep(spec, {}, 1);
  auto b = run_sweep(spec, {}, 8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].wall_time_ms = b[i].wall_time_ms = 0.0;
    EXPECT_EQ(a[i], b[i]);
  }
}

TEST(Records, SweepSlopes) {
  SweepSpec spec;
  spec.L_values = {0.25, 0.5, 1.0};
  spec.r_values = one_minus_pow10_grid(1, 5);
  spec.methods = {Method::quad};
  const auto rows = run_sweep(spec, {}, 4);
  ASSERT_EQ(rows.size(), 15u);
  // slope of log V against log(1/(1-r)) between k = 4 and 5
  auto slope = [&](int li) {
    const auto& a = rows[li * 5 + 3];
    const auto& b = rows[li * 5 + 4];
    return std::log(b.variance / a.variance) / std::log(10.0);
  };
  EXPECT_NEAR(slope(0), 1.5, 0.02);
  EXPECT_NEAR(slope(2), 1.0, 1e-3);
  EXPECT_GT(slope(1), 1.0);
}

TEST(Records, SpecValidation) {
  SweepSpec spec;
  spec.L_values = {1.0};
  spec.r_values = {0.5};
  EXPECT_THROW(spec.validate(), DomainError);
  spec.methods = {Method::quad};
  EXPECT_NO_THROW(spec.validate());
  spec.r_values = {1.5};
  EXPECT_THROW(spec.validate(), DomainError);
}

TEST(Records, PowerGrid) {
  const auto g = one_minus_pow10_grid(1, 3);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], 0.9);
  EXPECT_EQ(g[2], 1.0 - 1e-3);
  EXPECT_THROW(one_minus_pow10_grid(0, 3), DomainError);
}

TEST(Records, CsvRows) {
  RunRecord r;
  r.L = 1.0;
  r.r = 0.5;
  r.method = Method::mc;
  r.expected_count = 0.25;
  r.variance = 0.5;
  r.err_est_or_ci = mc::Interval{0.25, 0.75};
  r.regime = RegimeTag::supercritical;
  r.wall_time_ms = 2.0;
  EXPECT_EQ(to_csv({r}),
            "L,r,method,mean,variance,err,regime,ms\n1,0.5,mc,0.25,0.5,0.25;0.75,supercritical,2\n");
}
