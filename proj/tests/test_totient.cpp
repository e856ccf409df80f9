#include <gtest/gtest.h>

#include <random>

#include "totlab/totient.hpp"

using namespace totlab;

TEST(AlphaK, Examples) {
  EXPECT_EQ(alpha_k(3, 2), Rational(4, 3));
  EXPECT_EQ(alpha_k(5, 2), Rational(4, 5));
  EXPECT_EQ(alpha_k(3, 4), Rational(8, 9));
  EXPECT_EQ(alpha_k(2, 6), 1);
  EXPECT_THROW(alpha_k(3, 3), ArgumentError);
  EXPECT_THROW(alpha_k(9, 2), ArgumentError);
}

TEST(AlphaK, Bounds) {
  for (const std::uint64_t p : primes_up_to(100'000)) {
    if (p == 2) continue;
    for (int k = 2; k <= 20; k += 2) {
      const Rational a = alpha_k(p, k);
      Rational half = 1 / Rational(mpz_class(1) << (k / 2));
      ASSERT_LE(1 - half, a);
      ASSERT_LE(a, 1 + half);
    }
  }
}

TEST(PhiK, Examples) {
  EXPECT_EQ(phi_k(3, 2), 8);
  EXPECT_EQ(phi_k(5, 2), 16);
  EXPECT_EQ(phi_k(3, 4), 48);
  EXPECT_EQ(phi_k(4, 3), 32);
  for (int k = 1; k <= 8; ++k) EXPECT_EQ(phi_k(1, k), 1);
  EXPECT_THROW(phi_k(0, 1), ArgumentError);
  EXPECT_THROW(phi_k(5, 0), ArgumentError);
}

TEST(PhiKBrute, Examples) {
  EXPECT_EQ(phi_k_brute(3, 2), 8);
  EXPECT_EQ(phi_k_brute(4, 2), 8);
  EXPECT_EQ(phi_k_brute(15, 2), 128);
  EXPECT_EQ(phi_k_brute(1, 5), 1);
  EXPECT_THROW(phi_k_brute(101, 4), CapacityError);
}

TEST(PhiK, MatchesBruteForce) {
  auto check = [](std::uint64_t n_max, int k) {
    for (std::uint64_t n = 1; n <= n_max; ++n) ASSERT_EQ(phi_k(n, k), phi_k_brute(n, k)) << n << " " << k;
  };
  for (int k = 1; k <= 3; ++k) check(60, k);
  check(30, 4);
  check(20, 5);
  check(20, 6);
}

TEST(PhiK, Multiplicative) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> side(1, 31'622);
  std::uniform_int_distribution<int> kk(1, 12);
  int checked = 0;
  while (checked < 10'000) {
    const std::uint64_t m = side(rng), n = side(rng);
    if (std::gcd(m, n) != 1) continue;
    const int k = kk(rng);
    ASSERT_EQ(phi_k(m * n, k), phi_k(m, k) * phi_k(n, k)) << m << " " << n << " " << k;
    ++checked;
  }
}

TEST(PhiK, OddKClosedForm) {
  for (std::uint64_t n = 1; n <= 100'000; ++n) {
    const mpz_class phi = euler_phi(n);
    ASSERT_EQ(phi_k(n, 1), phi);
    ASSERT_EQ(jordan_j(n, 1), phi);
    mpz_class n2 = n;
    n2 *= n;
    ASSERT_EQ(phi_k(n, 3), n2 * phi);
  }
}

TEST(PhiK, PrimePowers) {
  for (const std::uint64_t p : primes_up_to(50)) {
    for (int k = 1; k <= 6; ++k) {
      const mpz_class base = phi_k(p, k);
      std::uint64_t pm = p;
      for (int m = 2; m <= 4; ++m) {
        pm *= p;
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), p, static_cast<unsigned long>(k) * (m - 1));
        ASSERT_EQ(phi_k(pm, k), scale * base);
        double cost = std::pow(static_cast<double>(pm), k);
        if (cost <= 2e6) ASSERT_EQ(phi_k_brute(pm, k), scale * base);
      }
    }
  }
}

TEST(Companions, Examples) {
  EXPECT_EQ(euler_phi(12), 4);
  EXPECT_EQ(jordan_j(4, 2), 12);
  EXPECT_EQ(jordan_j(1, 3), 1);
}

TEST(Params, DeltaExact) {
  const auto p = TotientParams::make(3, Rational(5, 2));
  EXPECT_EQ(p.delta, Rational(1, 2));
  EXPECT_THROW(TotientParams::make(0, 0), ArgumentError);
}

TEST(Range, Examples) {
  std::vector<TotientValue> values;
  RangeOptions opts;
  opts.materialize = true;
  phi_k_range(10, 1, [&](const TotientValue& v) { values.push_back(v); }, opts);
  ASSERT_EQ(values.size(), 10u);
  EXPECT_NEAR(values[5].log_ratio, std::log(1.0 / 3.0), 1e-15);

  values.clear();
  phi_k_range(10, 2, [&](const TotientValue& v) { values.push_back(v); }, opts);
  EXPECT_EQ(*values[8].phi_k, 72);

  values.clear();
  phi_k_range(1, 4, [&](const TotientValue& v) { values.push_back(v); }, opts);
  ASSERT_EQ(values.size(), 1u);
  EXPECT_EQ(values[0].n, 1u);
  EXPECT_EQ(*values[0].phi_k, 1);
  EXPECT_EQ(values[0].log_ratio, 0.0);
  EXPECT_THROW(phi_k_range(kMaxRange + 1, 1, [](const TotientValue&) {}), CapacityError);
}

TEST(Range, AgreesWithFormulaAndIsThreadIndependent) {
  for (int k : {1, 2, 4, 5}) {
    std::vector<double> one, many;
    RangeOptions a, b;
    a.segment_size = 1000;
    b.segment_size = 1000;
    b.threads = 4;
    phi_k_range(20'000, k, [&](const TotientValue& v) {
      one.push_back(v.log_ratio);
      ASSERT_LE(v.log_ratio, 0.0);
    }, a);
    phi_k_range(20'000, k, [&](const TotientValue& v) { many.push_back(v.log_ratio); }, b);
    ASSERT_EQ(one, many);
    for (std::uint64_t n = 1; n <= 20'000; n += 97) {
      const double exact = log_rational(Rational(phi_k(n, k))) - k * std::log(double(n));
      ASSERT_NEAR(one[n - 1], exact, 1e-12) << n;
    }
  }
}
