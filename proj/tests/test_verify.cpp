#include <gtest/gtest.h>

#include <random>

#include "totlab/verify.hpp"

using namespace totlab;

namespace {

// #{n <= x : phi(n) <= y} with ties at equality weighted by 1/2.
double perron_limit_k1(std::uint64_t x, std::uint64_t y) {
  double total = 0.0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    const auto phi = euler_phi(n).get_ui();
    total += phi < y ? 1.0 : (phi == y ? 0.5 : 0.0);
  }
  return total;
}

}  // namespace

TEST(Kernel, Examples) {
  const auto above = perron_kernel_check(2.0, 1.0, 1000.0);
  ASSERT_TRUE(above.bound);
  EXPECT_LE(std::abs(above.estimate - 1.0), *above.bound);
  const auto below = perron_kernel_check(0.5, 1.0, 1000.0);
  EXPECT_LE(std::abs(below.estimate), *below.bound);
  const auto tie = perron_kernel_check(1.0, 1.0, 1000.0);
  EXPECT_FALSE(tie.bound);
  EXPECT_NEAR(tie.estimate, 0.5, 1e-3);
}

TEST(Kernel, RandomCasesWithinBound) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_y(-3.0, 3.0), a(0.5, 2.0), T(100.0, 1000.0);
  for (int i = 0; i < 100; ++i) {
    double ly = log_y(rng);
    if (std::abs(ly) < 0.05) ly = ly < 0 ? -0.05 : 0.05;
    const double y = std::exp(ly);
    const auto c = perron_kernel_check(y, a(rng), T(rng));
    ASSERT_TRUE(c.bound);
    EXPECT_LE(std::abs(c.estimate - perron_step(y)), *c.bound) << y;
  }
}

TEST(Kernel, Errors) {
  EXPECT_THROW(perron_kernel_check(0.0, 1.0, 100.0), ArgumentError);
  EXPECT_THROW(perron_kernel_check(2.0, 0.0, 100.0), ArgumentError);
  EXPECT_THROW(perron_kernel_check(2.0, 1.0, 0.5), ArgumentError);
}

TEST(PerronExactA, SmallCaseConvergesToHalfWeightedCount) {
  // phi(n) = 4 for n = 5, 8, 10, so the Perron limit is 7 + 3/2 rather than 8.
  ASSERT_DOUBLE_EQ(perron_limit_k1(10, 4), 6.5);
  const auto e = perron_count_estimate(1, 0, 10, 4, 0.5, 500.0, 40, PerronMode::EXACT_A);
  EXPECT_NEAR(e.estimate, 6.5, 0.05);
  EXPECT_NEAR(e.estimate, count_phi_ratio(1, 0, 10, 4).count, 1.6);
}

TEST(PerronExactA, ErrorShrinksAsTauGrows) {
  const double exact = perron_limit_k1(10, 4);
  double previous = HUGE_VAL;
  for (double tau : {62.5, 250.0, 1000.0}) {
    const double err = std::abs(perron_count_estimate(1, 0, 10, 4, 0.5, tau, 40, PerronMode::EXACT_A).estimate - exact);
    EXPECT_LT(err, previous) << tau;
    previous = err;
  }
}

TEST(PerronExactA, ModerateX) {
  PerronOptions opts;
  opts.threads = 8;
  const auto e = perron_count_estimate(1, 0, 10'000, 5000, 0.5, 1000.0, 40, PerronMode::EXACT_A, opts);
  const double exact = static_cast<double>(count_phi_ratio(1, 0, 10'000, 5000).count);
  EXPECT_LE(std::abs(e.estimate / exact - 1.0), 0.05);
  EXPECT_LE(std::abs(e.estimate - e.coarse), 0.01 * exact);
}

TEST(PerronResidueR, FullEstimateTracksCount) {
  PerronOptions opts;
  opts.threads = 8;
  const auto e = perron_count_estimate(1, 0, 10'000, 5000, 0.5, 100.0, 40, PerronMode::RESIDUE_R, opts);
  const double exact = static_cast<double>(count_phi_ratio(1, 0, 10'000, 5000).count);
  ASSERT_TRUE(e.shift_abscissa);
  EXPECT_GT(*e.shift_abscissa, 1.0);
  EXPECT_NEAR(e.residue_term, r_value(1, 1.0).value.real() * 5000.0, 1e-3);
  EXPECT_LE(std::abs(e.estimate / exact - 1.0), 0.05);
  // Cauchy: moving the contour must not change the value.
  const auto line = perron_model_line_integral(1, 0, 10'000, 5000, 0.5, 100.0, 40, opts);
  EXPECT_NEAR(line.estimate, e.estimate, 1e-3 * exact);
}

TEST(PerronResidueR, LineRightOfPoleHasNoResidue) {
  const auto e = perron_count_estimate(1, 0, 1000, 500, 1.5, 50.0, 20, PerronMode::RESIDUE_R);
  EXPECT_EQ(e.residue_term, 0.0);
  EXPECT_FALSE(e.shift_abscissa);
  const auto line = perron_model_line_integral(1, 0, 1000, 500, 1.5, 50.0, 20);
  EXPECT_DOUBLE_EQ(e.estimate, line.estimate);
}

TEST(Perron, Errors) {
  EXPECT_THROW(perron_count_estimate(1, 0, 1000, 500, 1.0005, 50.0, 20, PerronMode::RESIDUE_R), GeometryError);
  EXPECT_THROW(perron_count_estimate(1, 0, 1000, 500, 0.5, 500.0, 20, PerronMode::RESIDUE_R), ArgumentError);
  EXPECT_THROW(perron_count_estimate(1, 1, 1000, 500, 0.5, 50.0, 20, PerronMode::RESIDUE_R), ArgumentError);
  EXPECT_THROW(perron_count_estimate(1, 0, kMaxPerronX + 1, 500, 0.5, 50.0, 20, PerronMode::EXACT_A), CapacityError);
  EXPECT_THROW(perron_count_estimate(1, 0, 1000, 0, 0.5, 50.0, 20, PerronMode::EXACT_A), ArgumentError);
  EXPECT_THROW(perron_count_estimate(1, 0, 1000, 500, -0.5, 50.0, 20, PerronMode::EXACT_A), ArgumentError);
}

TEST(Distribution, FrozenRowsAtOneMillion) {
  const auto k1 = verify_distribution(1, 0, 1'000'000, {Rational(1, 4), Rational(1, 2), Rational(3, 4)}, 4);
  ASSERT_EQ(k1.size(), 3u);
  EXPECT_EQ(k1[0].exact_count, 485117u);
  EXPECT_EQ(k1[1].exact_count, 823126u);
  EXPECT_EQ(k1[2].exact_count, 942577u);
  ASSERT_TRUE(k1[1].main_term);
  EXPECT_NEAR(*k1[1].main_term, 971798.2, 0.1);
  EXPECT_EQ(k1[1].regime.tag, Regime::THM6_MAIN);
  EXPECT_LE(*k1[0].rel_err, 0.02);

  const auto k2 = verify_distribution(2, 1, 1'000'000, {Rational(1, 4), Rational(1, 2), Rational(3, 4)}, 4);
  EXPECT_EQ(k2[0].exact_count, 449457u);
  EXPECT_EQ(k2[1].exact_count, 799580u);
  EXPECT_EQ(k2[2].exact_count, 923126u);
}

TEST(Distribution, MatchesCountFunction) {
  const auto rows = verify_distribution(3, Rational(5, 2), 20'000, {Rational(1, 10), Rational(3, 7)});
  for (const auto& row : rows) {
    EXPECT_EQ(row.exact_count, count_phi_ratio(3, Rational(5, 2), 20'000, row.y).count);
    EXPECT_EQ(row.regime.tag, classify_regime(3, Rational(5, 2), 20'000, row.y).tag);
  }
}

TEST(Distribution, RelativeErrorDecreasesWithX) {
  double previous = HUGE_VAL;
  for (std::uint64_t x : {10'000ULL, 100'000ULL, 1'000'000ULL}) {
    const auto row = verify_distribution(1, 0, x, {Rational(1, 2)}, 4).front();
    ASSERT_TRUE(row.rel_err);
    EXPECT_LT(*row.rel_err, previous) << "x = " << x;
    previous = *row.rel_err;
  }
}

TEST(Extremal, MinimalConstants) {
  EXPECT_NEAR(minimal_constant(1), 0.561459484, 1e-9);
  EXPECT_NEAR(minimal_constant(3), minimal_constant(1), 0.0);
  EXPECT_NEAR(minimal_constant(2), 0.714866, 1e-5);
  EXPECT_NEAR(minimal_constant(4), 0.455101, 1e-5);
  // k = 4: (4/3) e^-gamma / zeta(2)
  EXPECT_NEAR(minimal_constant(4), 4.0 / 3.0 * std::exp(-Constants{}.gamma) * 6.0 / (M_PI * M_PI), 1e-14);
  EXPECT_THROW(minimal_constant(0), ArgumentError);
}

TEST(Extremal, PrimorialRows) {
  const auto r = verify_extremal(1, 1000);
  ASSERT_EQ(r.rows.size(), 999u);
  EXPECT_EQ(r.rows.front().s, 2u);
  const auto& s6 = r.rows[4];
  EXPECT_EQ(s6.s, 6u);
  EXPECT_EQ(s6.p_s, 13u);
  ASSERT_TRUE(s6.n_s);
  EXPECT_EQ(*s6.n_s, 30030);
  EXPECT_NEAR(s6.ratio, 0.797, 1e-3);
  // direct evaluation at n = 30030
  const double direct = euler_phi(30030).get_d() * std::log(std::log(30030.0)) / 30030.0 / r.constant;
  EXPECT_NEAR(s6.ratio, direct, 1e-12);
  EXPECT_FALSE(r.rows.back().n_s);
  EXPECT_EQ(r.rows.back().p_s, 7919u);
  ASSERT_EQ(r.max_order.size(), 10u);
  for (const auto& m : r.max_order) EXPECT_GE(m.ratio, m.lower_bound);
}

TEST(Extremal, EvenKUsesTwistedFactors) {
  const auto r = verify_extremal(2, 15);  // n_15 still fits in 64 bits
  const auto& last = r.rows.back();
  ASSERT_TRUE(last.n_s);
  const double n = last.n_s->get_d();
  const double direct = phi_k(last.n_s->get_ui(), 2).get_d() / (n * n) * std::log(std::log(n)) / r.constant;
  EXPECT_NEAR(last.ratio, direct, 1e-9);
}

TEST(Extremal, Errors) {
  EXPECT_THROW(verify_extremal(1, 1), ArgumentError);
  EXPECT_THROW(verify_extremal(1, 1'000'000), CapacityError);
}

TEST(Mertens, Rows) {
  const auto rows = verify_mertens({1000, 1'000'000}, 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(std::abs(rows[1].product_deviation()), 1e-4);
  EXPECT_LT(std::abs(rows[1].sum_deviation()), 1e-4);
  EXPECT_LT(std::abs(rows[1].power_deviation()), 1e-6);
  EXPECT_LT(std::abs(rows[1].chi_deviation()), 1e-4);
  EXPECT_NEAR(rows[1].product_chi_limit, 4.0 / M_PI, 1e-14);
  for (auto dev : {&MertensRow::product_deviation, &MertensRow::sum_deviation, &MertensRow::power_deviation}) {
    EXPECT_LT(std::abs((rows[1].*dev)()), std::abs((rows[0].*dev)()));
  }
  EXPECT_THROW(verify_mertens({5}), ArgumentError);
}
