#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "totlab/arith.hpp"
#include "totlab/rational.hpp"
#include "totlab/sieve.hpp"

namespace totlab {

using ComplexVal = std::complex<double>;

inline constexpr double kMaxEulerProductZ = 1e4;
inline constexpr double kMinEulerProductTol = 1e-12;
inline constexpr std::uint64_t kMaxEulerTruncation = 200'000'000ULL;
inline constexpr std::uint64_t kMaxDirichletTerms = 10'000'000ULL;

// ---------------------------------------------------------------------------
// Compensated summation and small complex helpers
// ---------------------------------------------------------------------------

/// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(ComplexVal v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  ComplexVal value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_, im_;
};

namespace detail {

// exp(u) - 1 without cancellation for small |u|.
inline ComplexVal expm1(ComplexVal u) {
  const double a = u.real(), b = u.imag();
  const double half_sin = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * half_sin * half_sin, std::exp(a) * std::sin(b)};
}

// log(1 + w), principal branch, accurate for small |w|.
inline ComplexVal log1p(ComplexVal w) {
  const double x = w.real(), y = w.imag();
  return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Zeta and L(., chi_1)
// ---------------------------------------------------------------------------

/// zeta(s) - 1 for real s > 1, by Euler-Maclaurin with eight Bernoulli
/// corrections; keeps full relative precision as s grows.
inline double zeta_minus_one(double s) {
  if (!(s > 1.0)) throw DomainError("zeta: s must be > 1");
  // B_{2j} / (2j)!
  static constexpr std::array<double, 8> kCoeff = {
      1.0 / 6.0 / 2.0,
      -1.0 / 30.0 / 24.0,
      1.0 / 42.0 / 720.0,
      -1.0 / 30.0 / 40320.0,
      5.0 / 66.0 / 3628800.0,
      -691.0 / 2730.0 / 479001600.0,
      7.0 / 6.0 / 87178291200.0,
      -3617.0 / 510.0 / 20922789888000.0,
  };
  const int cutoff = std::max(20, 4 * static_cast<int>(std::ceil(s)));
  const double n_cut = cutoff;
  CompensatedSum sum;
  for (int n = cutoff - 1; n >= 2; --n) sum.add(std::pow(static_cast<double>(n), -s));
  const double n_pow = std::pow(n_cut, -s);
  sum.add(n_cut * n_pow / (s - 1.0));
  sum.add(0.5 * n_pow);
  double rising = s;               // s (s+1) ... (s+2j-2)
  double power = n_pow / n_cut;    // N^(-s-2j+1)
  for (std::size_t j = 0; j < kCoeff.size(); ++j) {
    sum.add(kCoeff[j] * rising * power);
    const double m = 2.0 * static_cast<double>(j) + 1.0;
    rising *= (s + m) * (s + m + 1.0);
    power /= n_cut * n_cut;
  }
  return sum.value();
}

/// Riemann zeta at real s > 1.
inline double zeta_real(double s) { return 1.0 + zeta_minus_one(s); }

namespace detail {

// Sum_{m >= first} (-1)^m (2m+1)^-j by iterated averaging of 31 consecutive
// partial sums (depth 30), which converges geometrically even at j = 1.
inline double alternating_chi1_sum(double j, int first) {
  constexpr int kStart = 30, kDepth = 30;
  auto term = [j](int m) {
    const double t = std::pow(2.0 * m + 1.0, -j);
    return (m % 2 == 0) ? t : -t;
  };
  CompensatedSum partial;
  for (int m = first; m < first + kStart; ++m) partial.add(term(m));
  std::array<double, kDepth + 1> sums{};
  for (int i = 0; i <= kDepth; ++i) {
    partial.add(term(first + kStart + i));
    sums[i] = partial.value();
  }
  for (int depth = kDepth; depth > 0; --depth) {
    for (int i = 0; i < depth; ++i) sums[i] = 0.5 * (sums[i] + sums[i + 1]);
  }
  return sums[0];
}

}  // namespace detail

/// L(j, chi_1) = sum chi_1(n) n^-j for real j >= 1.
inline double l_chi1(double j) {
  if (!(j >= 1.0)) throw DomainError("L(j, chi_1): j must be >= 1");
  return detail::alternating_chi1_sum(j, 0);
}

/// L(j, chi_1) - 1 without cancellation for large j.
inline double l_chi1_minus_one(double j) {
  if (!(j >= 1.0)) throw DomainError("L(j, chi_1): j must be >= 1");
  return detail::alternating_chi1_sum(j, 1);
}

namespace detail {

// Number of Moebius terms needed so that 2^(-m s) < 1e-20.
inline int moebius_terms(double s) { return static_cast<int>(std::ceil(66.5 / s)) + 1; }

}  // namespace detail

/// Prime zeta P(s) = sum_p p^-s = sum_m mu(m)/m ln zeta(ms), s > 1.
inline double prime_zeta(double s) {
  if (!(s > 1.0)) throw DomainError("prime zeta: s must be > 1");
  CompensatedSum sum;
  const int terms = detail::moebius_terms(s);
  for (int m = terms; m >= 1; --m) {
    const int mu = mobius(static_cast<std::uint64_t>(m));
    if (mu == 0) continue;
    sum.add(mu / static_cast<double>(m) * std::log1p(zeta_minus_one(m * s)));
  }
  return sum.value();
}

/// sum_p chi_1(p) p^-s = sum_m mu(m)/m ln L(ms, chi_1^m), s > 1, where
/// chi_1^m is the principal character mod 4 for even m.
inline double prime_l_chi1(double s) {
  if (!(s > 1.0)) throw DomainError("prime L-series: s must be > 1");
  CompensatedSum sum;
  const int terms = detail::moebius_terms(s);
  for (int m = terms; m >= 1; --m) {
    const int mu = mobius(static_cast<std::uint64_t>(m));
    if (mu == 0) continue;
    const double ms = m * s;
    const double log_l = (m % 2 == 1) ? std::log1p(l_chi1_minus_one(ms))
                                       : std::log1p(-std::exp2(-ms)) + std::log1p(zeta_minus_one(ms));
    sum.add(mu / static_cast<double>(m) * log_l);
  }
  return sum.value();
}

// ---------------------------------------------------------------------------
// Euler products G, I and R
// ---------------------------------------------------------------------------

/// Real exponent lambda_p with (p/(p-1))^z alpha_k(p)^-z = exp(z lambda_p).
inline double local_exponent(std::uint64_t p, int k) {
  return -std::log1p(-1.0 / static_cast<double>(p)) - log_alpha(p, k);
}

/// Local factor of R_k at p: 1 - 1/p + (1/p) (p/(p-1))^z alpha_k(p)^-z.
inline ComplexVal euler_factor(std::uint64_t p, ComplexVal z, int k) {
  if (k < 1) throw ArgumentError("euler_factor: k must be >= 1");
  if (!is_prime_u64(p)) throw ArgumentError("euler_factor: p must be prime");
  return 1.0 + detail::expm1(z * local_exponent(p, k)) / static_cast<double>(p);
}

/// Truncated Euler product with a certified bound on the omitted primes.
struct EulerProductResult {
  ComplexVal value;
  std::uint64_t truncation_prime = 0;
  double tail_bound = 0.0;  // bound on |value / true product - 1| from primes > truncation_prime
};

/// Evaluates prod_p (1 + p^-a (exp(z lambda_p) - 1)) for |z| <= z_max.
///
/// With a = 1 this is R_k(z); with a = s + (1 - delta) z it is the factor
/// G_{k,beta}(s, z) or I_{k,beta}(s, z) of the Dirichlet series F_{k,beta}.
/// Primes p <= P are multiplied exactly. For p > P the first-order term
/// z lambda_p p^-a of each log-factor is summed in closed form through the
/// prime zeta function (and its chi_1 twist for k = 2 mod 4); the quadratic
/// remainder is bounded by
///   c^2 |z|^2 e^u0 (1/2 + e^u0 / P) * sum_{p > P} (p-1)^-3,
/// where |lambda_p| <= c / (p - 1) (c = 1 for odd k, 2 for even k),
/// u0 = c z_max / P <= 1/2, and the prime sum is bounded with
/// pi(t) < 1.25506 t / ln t.
class EulerProduct {
 public:
  EulerProduct(int k, double a, double z_max, double tol,
               std::optional<std::uint64_t> forced_truncation = std::nullopt)
      : k_(k), a_(a), z_max_(z_max) {
    if (k < 1) throw ArgumentError("Euler product: k must be >= 1");
    if (!(a >= 1.0)) throw DomainError("Euler product: exponent a must be >= 1");
    if (!(z_max >= 0.0) || z_max > kMaxEulerProductZ) {
      throw ArgumentError("Euler product: |z| must be <= 10^4");
    }
    if (!(tol >= kMinEulerProductTol) || tol < 1e-15 * (1.0 + z_max)) {
      throw PrecisionError("Euler product: tolerance unreachable in double precision");
    }
    c_ = (k % 2 == 0) ? 2.0 : 1.0;
    const auto p_min = static_cast<std::uint64_t>(std::max(64.0, std::ceil(2.0 * c_ * z_max) + 1.0));
    if (forced_truncation) {
      if (*forced_truncation < p_min) throw ArgumentError("Euler product: truncation prime too small for |z|");
      truncation_ = *forced_truncation;
    } else {
      std::uint64_t p = p_min;
      while (std::expm1(remainder_bound(p, z_max)) > tol) {
        p = static_cast<std::uint64_t>(std::ceil(static_cast<double>(p) * 1.25));
        if (p > kMaxEulerTruncation) throw PrecisionError("Euler product: tolerance needs too many primes");
      }
      truncation_ = p;
    }
    primes_ = primes_up_to(truncation_);
    lambda_.reserve(primes_.size());
    weight_.reserve(primes_.size());
    for (const std::uint64_t p : primes_) {
      lambda_.push_back(local_exponent(p, k));
      weight_.push_back(std::pow(static_cast<double>(p), -a));
    }
    leading_tail_ = compute_leading_tail();
  }

  std::uint64_t truncation_prime() const { return truncation_; }
  double z_max() const { return z_max_; }

  /// Certified relative tail bound at |z| = z_abs.
  double tail_bound(double z_abs) const { return std::expm1(remainder_bound(truncation_, z_abs)); }

  EulerProductResult operator()(ComplexVal z) const {
    const double z_abs = std::abs(z);
    if (z_abs > z_max_ * (1.0 + 1e-12)) throw ArgumentError("Euler product: |z| above the configured maximum");
    CompensatedComplexSum log_sum;
    for (std::size_t i = primes_.size(); i-- > 0;) {
      log_sum.add(detail::log1p(weight_[i] * detail::expm1(z * lambda_[i])));
    }
    log_sum.add(z * leading_tail_);
    const ComplexVal value = std::exp(log_sum.value());
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw PrecisionError("Euler product: value not representable in double precision");
    }
    return {value, truncation_, tail_bound(z_abs)};
  }

 private:
  double remainder_bound(std::uint64_t p_cut, double z_abs) const {
    const double p = static_cast<double>(p_cut);
    const double u0 = c_ * z_abs / p;
    const double cube_integers = 1.0 / (p * p * p) + 0.5 / (p * p);
    const double q = p - 1.0;
    const double cube_primes = 1.25506 / std::log(p) * (1.5 / (q * q) + 1.0 / (q * q * q));
    const double cube_sum = std::min(cube_integers, cube_primes);
    const double e = std::exp(u0);
    return c_ * c_ * z_abs * z_abs * e * (0.5 + e / p) * cube_sum;
  }

  // sum_{p > P} p^-s, from P(s) minus the partial sum.
  double prime_tail(double s, bool twisted) const {
    CompensatedSum partial;
    for (std::size_t i = primes_.size(); i-- > 0;) {
      const double t = std::pow(static_cast<double>(primes_[i]), -s);
      partial.add(twisted ? chi1(primes_[i]) * t : t);
    }
    return (twisted ? prime_l_chi1(s) : prime_zeta(s)) - partial.value();
  }

  // Crude bound on sum_{n > P} n^-s, used to stop the expansions.
  double integer_tail(double s) const {
    const double p = static_cast<double>(truncation_);
    return std::pow(p, 1.0 - s) / (s - 1.0);
  }

  // sum_{p > P} lambda_p p^-a via
  //   -ln(1 - 1/p) = sum_j p^-j / j,   -ln alpha_k(p) = sum_m (sign_p p^-h)^m / m.
  double compute_leading_tail() const {
    constexpr double kNegligible = 1e-24;
    CompensatedSum tail;
    for (int j = 1;; ++j) {
      const double s = j + a_;
      if (integer_tail(s) / j < kNegligible) break;
      tail.add(prime_tail(s, false) / j);
    }
    if (k_ % 2 == 0) {
      const int h = k_ / 2;
      for (int m = 1;; ++m) {
        const double s = static_cast<double>(h) * m + a_;
        if (integer_tail(s) / m < kNegligible) break;
        const bool twisted = (h % 2 == 1) && (m % 2 == 1);
        tail.add(prime_tail(s, twisted) / m);
      }
    }
    return tail.value();
  }

  int k_;
  double a_;
  double z_max_;
  double c_ = 1.0;
  std::uint64_t truncation_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<double> lambda_;
  std::vector<double> weight_;
  double leading_tail_ = 0.0;
};

/// R_k(z) = prod_p (1 - 1/p + (1/p) (p/(p-1))^z alpha_k(p)^-z) to relative accuracy tol.
/// The product does not depend on beta; callers evaluate it at z = 1/(1 - delta).
inline EulerProductResult r_value(int k, ComplexVal z, double tol = 1e-10) {
  if (!(tol >= kMinEulerProductTol)) throw PrecisionError("r_value: tolerance below 1e-12");
  const double z_abs = std::abs(z);
  if (!(z_abs <= kMaxEulerProductZ)) throw ArgumentError("r_value: |z| must be <= 10^4");
  return EulerProduct(k, 1.0, z_abs, tol)(z);
}

// ---------------------------------------------------------------------------
// Mertens-type sums and products
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::uint32_t> mertens_primes(std::uint64_t x) {
  if (x < 2) throw DomainError("Mertens functions need x >= 2");
  return primes_up_to(x);
}

template <class LogFactor>
double product_over_primes(std::uint64_t x, LogFactor&& log_factor) {
  CompensatedSum sum;
  for (const std::uint64_t p : mertens_primes(x)) sum.add(log_factor(p));
  return std::exp(sum.value());
}

}  // namespace detail

/// sum_{p <= x} 1/p
inline double mertens_sum(std::uint64_t x) {
  CompensatedSum sum;
  for (const std::uint64_t p : detail::mertens_primes(x)) sum.add(1.0 / static_cast<double>(p));
  return sum.value();
}

/// prod_{p <= x} (1 - 1/p)
inline double mertens_product(std::uint64_t x) {
  return detail::product_over_primes(x, [](std::uint64_t p) { return std::log1p(-1.0 / static_cast<double>(p)); });
}

/// prod_{p <= x} (1 - p^-j), j >= 2
inline double mertens_product_power(std::uint64_t x, int j) {
  if (j < 2) throw DomainError("mertens_product_power: j must be >= 2");
  return detail::product_over_primes(
      x, [j](std::uint64_t p) { return std::log1p(-std::pow(static_cast<double>(p), -j)); });
}

/// prod_{p <= x} (1 - chi_1(p) p^-j), j >= 1
inline double mertens_product_chi(std::uint64_t x, int j) {
  if (j < 1) throw DomainError("mertens_product_chi: j must be >= 1");
  return detail::product_over_primes(x, [j](std::uint64_t p) {
    return std::log1p(-chi1(static_cast<std::int64_t>(p)) * std::pow(static_cast<double>(p), -j));
  });
}

// ---------------------------------------------------------------------------
// Dirichlet series versus Euler product
// ---------------------------------------------------------------------------

struct DirichletCheck {
  double lhs = 0.0;            // sum_{n <= N} n^(-s + beta z) Phi_k(n)^-z
  double rhs = 0.0;            // Euler factor times zeta(s + z - delta z)
  double gap = 0.0;            // |lhs - rhs|
  double tail_estimate = 0.0;  // leading size of the omitted terms n > N
};

/// Compares the truncated series F_{k,beta}(s, z) with its factorization
/// (G or I)(s, z) * zeta(s + z - delta z) at real s, z.
inline DirichletCheck dirichlet_series_check(int k, const Rational& beta, double s, double z, std::uint64_t terms,
                                             unsigned threads = 1) {
  if (k < 1) throw ArgumentError("dirichlet_series_check: k must be >= 1");
  if (terms < 1) throw ArgumentError("dirichlet_series_check: N must be >= 1");
  if (terms > kMaxDirichletTerms) throw CapacityError("dirichlet_series_check: N exceeds 10^7");
  const double delta = Rational(beta - (k - 1)).get_d();
  const double shifted = s + (1.0 - delta) * z;
  if (!(s >= 0.0) || !((1.0 - delta) * z >= 0.0) || !(shifted > 1.0)) {
    throw DomainError("dirichlet_series_check: (s, z) outside the convergence region");
  }
  const double beta_d = beta.get_d();
  MultiplicativeSieve sieve(terms, k);
  const auto partials = sieve.map_segments(
      [&](const Segment& seg) {
        CompensatedSum part;
        for (std::size_t i = 0; i < seg.size(); ++i) {
          const double ln_n = std::log(static_cast<double>(seg.n(i)));
          part.add(std::exp((-s + beta_d * z - k * z) * ln_n - z * seg.log_ratio(i)));
        }
        return part.value();
      },
      threads);
  CompensatedSum lhs;
  for (const double v : partials) lhs.add(v);

  const double factor = EulerProduct(k, shifted, std::abs(z), 1e-12)(ComplexVal(z, 0.0)).value.real();
  DirichletCheck out;
  out.lhs = lhs.value();
  out.rhs = factor * zeta_real(shifted);
  out.gap = std::abs(out.lhs - out.rhs);
  out.tail_estimate = factor * std::pow(static_cast<double>(terms), 1.0 - shifted) / (shifted - 1.0);
  return out;
}

}  // namespace totlab
