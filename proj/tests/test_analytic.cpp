#include <gtest/gtest.h>

#include <numbers>

#include "totlab/analytic.hpp"
#include "totlab/totient.hpp"

using namespace totlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Local factor computed the plain way, with std::pow on complex numbers.
ComplexVal plain_factor(std::uint64_t p, ComplexVal z, int k) {
  const double pd = static_cast<double>(p);
  ComplexVal f = std::pow(ComplexVal(pd / (pd - 1.0)), z);
  if (k % 2 == 0 && p != 2) f *= std::pow(ComplexVal(alpha_k(p, k).get_d()), -z);
  return 1.0 - 1.0 / pd + f / pd;
}

}  // namespace

TEST(Zeta, ClosedForms) {
  EXPECT_NEAR(zeta_real(2), kPi * kPi / 6.0, 1e-14);
  EXPECT_NEAR(zeta_real(4), std::pow(kPi, 4) / 90.0, 1e-14);
  EXPECT_NEAR(zeta_real(6), std::pow(kPi, 6) / 945.0, 1e-14);
  EXPECT_NEAR(zeta_real(3), 1.2020569031595942854, 1e-14);
}

TEST(Zeta, NearOneAndLargeArguments) {
  // zeta(s) = 1/(s-1) + gamma + O(s-1)
  EXPECT_NEAR(zeta_real(1.001), 1000.0 + 0.5772156649 + 0.0728158 * 0.001, 1e-6);
  for (double s : {20.0, 35.5, 60.0}) {
    double direct = 0.0;
    for (int n = 40; n >= 2; --n) direct += std::pow(n, -s);
    EXPECT_NEAR(zeta_minus_one(s) / direct, 1.0, 1e-13) << s;
  }
}

TEST(Zeta, Domain) {
  EXPECT_THROW(zeta_real(1.0), DomainError);
  EXPECT_THROW(zeta_real(0.5), DomainError);
  EXPECT_THROW(zeta_real(std::nan("")), DomainError);
}

TEST(LChi1, Values) {
  EXPECT_NEAR(l_chi1(1), kPi / 4.0, 1e-13);
  EXPECT_NEAR(l_chi1(2), 0.915965594177219015, 1e-13);
  EXPECT_NEAR(l_chi1(3), std::pow(kPi, 3) / 32.0, 1e-13);
  for (double j : {10.0, 25.0, 60.0}) {
    EXPECT_LE(std::abs(l_chi1(j) - 1.0), 2.0 * std::pow(3.0, -j));
    const double leading = -std::pow(3.0, -j) + std::pow(5.0, -j) - std::pow(7.0, -j) + std::pow(9.0, -j);
    EXPECT_NEAR(l_chi1_minus_one(j) / leading, 1.0, 5e-6);
  }
  EXPECT_THROW(l_chi1(0.9), DomainError);
}

TEST(PrimeSeries, AgainstDirectSums) {
  EXPECT_NEAR(prime_zeta(2), 0.452247420041065498506543364832, 1e-13);
  const auto primes = primes_up_to(1'000'000);
  double direct = 0.0, twisted = 0.0;
  for (auto it = primes.rbegin(); it != primes.rend(); ++it) {
    const double p = *it;
    direct += std::pow(p, -3.0);
    twisted += chi1(*it) * std::pow(p, -3.0);
  }
  // omitted primes contribute less than 1/(2 * 10^12)
  EXPECT_NEAR(prime_zeta(3), direct, 1e-12);
  EXPECT_NEAR(prime_l_chi1(3), twisted, 1e-12);
}

TEST(EulerFactor, Examples) {
  for (int k = 1; k <= 6; ++k) {
    for (std::uint64_t p : {2, 3, 5, 101}) EXPECT_EQ(euler_factor(p, 0.0, k), ComplexVal(1.0));
  }
  EXPECT_NEAR(euler_factor(2, 1.0, 1).real(), 1.5, 1e-15);
  EXPECT_NEAR(euler_factor(3, 1.0, 2).real(), 1.0 + 1.0 / 24.0, 1e-15);
  const ComplexVal z(0.7, -3.1);
  for (int k = 1; k <= 6; ++k) {
    for (std::uint64_t p : {2, 3, 7, 13, 997}) {
      EXPECT_LT(std::abs(euler_factor(p, z, k) - plain_factor(p, z, k)), 1e-14);
    }
  }
  EXPECT_THROW(euler_factor(9, 1.0, 1), ArgumentError);
}

TEST(RValue, MatchesZetaQuotient) {
  const auto r = r_value(1, 1.0, 1e-10);
  const double expected = zeta_real(2) * zeta_real(3) / zeta_real(6);
  EXPECT_NEAR(r.value.real(), expected, 1e-9);
  EXPECT_NEAR(r.value.real(), 1.9435964368, 1e-10);
  EXPECT_EQ(r.value.imag(), 0.0);
  EXPECT_GE(r.tail_bound, 0.0);
  EXPECT_LE(r.tail_bound, 1e-10);
}

TEST(RValue, ZeroIsExactlyOne) {
  for (int k = 1; k <= 6; ++k) {
    const auto r = r_value(k, 0.0);
    EXPECT_EQ(r.value, ComplexVal(1.0));
  }
}

TEST(RValue, AgreesWithDirectProduct) {
  // Direct product over p <= 10^7; its own omitted tail is below
  // sum_{p > P} 2/p^2 < 2.6 / (P ln P).
  constexpr std::uint64_t kP = 10'000'000;
  const auto primes = primes_up_to(kP);
  ComplexVal log_sum = 0.0;
  for (auto it = primes.rbegin(); it != primes.rend(); ++it) log_sum += std::log(plain_factor(*it, 1.0, 2));
  const double direct = std::exp(log_sum).real();
  const double oracle_tail = 2.6 / (kP * std::log(static_cast<double>(kP)));
  const auto r = r_value(2, 1.0, 1e-10);
  EXPECT_NEAR(r.value.real(), direct, 1e-10 + oracle_tail * direct);
}

TEST(RValue, ConjugateSymmetry) {
  for (const ComplexVal z : {ComplexVal(0.5, 2.0), ComplexVal(2.0, -7.5), ComplexVal(1.3, 40.0)}) {
    for (int k : {1, 2, 3, 4}) {
      const auto a = r_value(k, z, 1e-9);
      const auto b = r_value(k, std::conj(z), 1e-9);
      EXPECT_LT(std::abs(a.value - std::conj(b.value)), 1e-12 * std::abs(a.value));
    }
  }
}

TEST(RValue, TailBoundCoversDoubling) {
  for (const ComplexVal z : {ComplexVal(1.0, 0.0), ComplexVal(0.8, 25.0), ComplexVal(3.0, -120.0)}) {
    for (int k : {1, 2, 4, 6}) {
      const auto r = r_value(k, z, 1e-8);
      const EulerProduct doubled(k, 1.0, std::abs(z), 1e-8, 2 * r.truncation_prime);
      const auto d = doubled(z);
      EXPECT_LE(std::abs(d.value / r.value - 1.0), r.tail_bound) << k << " " << z;
      EXPECT_LT(r.tail_bound, 1.0);
    }
  }
}

TEST(RValue, Errors) {
  EXPECT_THROW(r_value(1, 1.0, 1e-13), PrecisionError);
  EXPECT_THROW(r_value(1, ComplexVal(0.0, 2e4), 1e-6), ArgumentError);
  EXPECT_THROW(r_value(0, 1.0), ArgumentError);
}

TEST(Mertens, Examples) {
  EXPECT_NEAR(mertens_sum(10), 1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7, 1e-15);
  EXPECT_NEAR(mertens_product(10), 8.0 / 35.0, 1e-15);
  EXPECT_NEAR(mertens_product_power(10, 2), (3.0 / 4) * (8.0 / 9) * (24.0 / 25) * (48.0 / 49), 1e-15);
  EXPECT_NEAR(mertens_product_chi(10, 1), (4.0 / 3) * (4.0 / 5) * (8.0 / 7), 1e-15);
  EXPECT_THROW(mertens_sum(1), DomainError);
  EXPECT_THROW(mertens_product_power(100, 1), DomainError);
  EXPECT_THROW(mertens_product_chi(100, 0), DomainError);
}

TEST(Mertens, ProductApproachesLimit) {
  const double eg = std::exp(Constants{}.gamma);
  double previous = 1.0;
  for (std::uint64_t x : {1'000ULL, 10'000ULL, 100'000ULL, 1'000'000ULL}) {
    const double scaled = mertens_product(x) * std::log(static_cast<double>(x)) * eg;
    EXPECT_GE(scaled, 0.95);
    EXPECT_LE(scaled, 1.05);
    const double dev = std::abs(scaled - 1.0);
    EXPECT_LE(dev, previous) << x;
    previous = dev;
  }
}

TEST(Mertens, SumConstant) {
  const double x = 1e6;
  EXPECT_LE(std::abs(mertens_sum(1'000'000) - std::log(std::log(x)) - Constants{}.meissel_mertens), 0.01);
}

TEST(Mertens, PowerProducts) {
  for (int j : {2, 3}) {
    for (std::uint64_t x : {1'000ULL, 10'000ULL}) {
      const double gap = std::abs(mertens_product_power(x, j) - 1.0 / zeta_real(j));
      EXPECT_LE(gap, 2.0 * std::pow(static_cast<double>(x), -(j - 1.0))) << j << " " << x;
    }
  }
  EXPECT_NEAR(mertens_product_chi(1'000'000, 1), 1.0 / l_chi1(1), 0.02);
  EXPECT_NEAR(mertens_product_chi(100'000, 2), 1.0 / l_chi1(2), 1e-5);
}

TEST(DirichletSeries, Examples) {
  const auto a = dirichlet_series_check(1, 0, 2.0, 1.0, 1'000'000);
  EXPECT_LT(a.gap, 1e-4);
  const auto b = dirichlet_series_check(2, 1, 2.0, 1.0, 1'000'000);
  EXPECT_LT(b.gap, 1e-4);
  const auto c = dirichlet_series_check(1, 0, 3.0, 0.0, 10'000);
  EXPECT_EQ(c.rhs, zeta_real(3.0));
  EXPECT_NEAR(c.lhs, zeta_real(3.0), 1e-8);
}

TEST(DirichletSeries, GapTracksTail) {
  for (int k : {1, 3, 4}) {
    const Rational beta(k - 1);
    const auto r = dirichlet_series_check(k, beta, 1.5, 0.5, 200'000, 4);
    EXPECT_LT(r.gap, 1.5 * r.tail_estimate + 1e-12) << k;
    EXPECT_GT(r.gap, 0.5 * r.tail_estimate) << k;
  }
}

TEST(DirichletSeries, Errors) {
  EXPECT_THROW(dirichlet_series_check(1, 0, 0.5, 0.2, 100), DomainError);
  EXPECT_THROW(dirichlet_series_check(1, 0, 2.0, 1.0, kMaxDirichletTerms + 1), CapacityError);
}
