#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "totlab/errors.hpp"

namespace totlab {

inline constexpr std::uint64_t kMaxPrimeLimit = 1'000'000'000ULL;
inline constexpr std::uint64_t kMaxSpfHi = 1'000'000'000'000ULL;
inline constexpr std::uint64_t kTrialDivisionLimit = 1'000'000ULL;
inline constexpr std::size_t kDefaultSegmentSize = std::size_t{1} << 20;

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// Numeric constants shared by the analytic and verification code.
///
/// The decimal expansions are kept to 40 digits for reference; the double
/// fields are what the computations use. kappa is the constant of the
/// regime thresholds, identified through b0 = log(kappa / e).
struct Constants {
  static constexpr std::string_view gamma_digits = "0.5772156649015328606065120900824024310422";
  static constexpr std::string_view meissel_mertens_digits =
      "0.2614972128476427837554268386086958590516";

  double gamma = 0.57721566490153286060651209008240243104;
  double meissel_mertens = 0.26149721284764278375542683860869585905;
  double kappa = std::exp(1.0 + 0.26149721284764278375542683860869585905);

  /// Default constants, optionally with kappa overridden.
  static Constants with_kappa(double kappa_override) {
    Constants c;
    c.kappa = kappa_override;
    return c;
  }
};

// ---------------------------------------------------------------------------
// Prime sieves
// ---------------------------------------------------------------------------

namespace detail {

// Plain odd-only Eratosthenes, used for the base primes of the segmented sieve.
inline std::vector<std::uint32_t> simple_sieve(std::uint32_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  const std::uint32_t half = (limit - 1) / 2;  // index i <-> 2i + 1, i in [1, half]
  std::vector<char> composite(half + 1, 0);
  for (std::uint64_t i = 1; i <= half; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    primes.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t j = (p * p - 1) / 2; j <= half; j += p) composite[j] = 1;
  }
  return primes;
}

inline std::uint32_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return static_cast<std::uint32_t>(r);
}

}  // namespace detail

/// All primes p <= limit in ascending order (segmented sieve of Eratosthenes).
inline std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
  if (limit > kMaxPrimeLimit) {
    throw CapacityError("primes_up_to: limit " + std::to_string(limit) + " exceeds cap 10^9");
  }
  if (limit < 2) return {};
  const auto root = detail::isqrt(limit);
  const auto base = detail::simple_sieve(root);

  std::vector<std::uint32_t> primes;
  if (limit > 100) {
    const double l = static_cast<double>(limit);
    primes.reserve(static_cast<std::size_t>(1.26 * l / std::log(l)) + 16);
  }
  primes.push_back(2);

  // Segments over odd numbers: slot i of a segment starting at odd `lo` is lo + 2i.
  constexpr std::uint64_t kSlots = std::uint64_t{1} << 18;
  std::vector<char> composite(kSlots);
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSlots) {
    const std::uint64_t hi = std::min<std::uint64_t>(limit, lo + 2 * kSlots - 2);
    const std::uint64_t slots = (hi - lo) / 2 + 1;
    std::fill_n(composite.begin(), slots, 0);
    for (std::size_t b = 1; b < base.size(); ++b) {
      const std::uint64_t p = base[b];
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t j = (start - lo) / 2; j < slots; j += p) composite[j] = 1;
    }
    for (std::uint64_t i = 0; i < slots; ++i) {
      if (!composite[i]) primes.push_back(static_cast<std::uint32_t>(lo + 2 * i));
    }
  }
  return primes;
}

/// Primes up to 10^6, built once and shared.
inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> table = primes_up_to(kTrialDivisionLimit);
  return table;
}

/// Smallest prime factor of every n in [lo, hi]; entry i belongs to lo + i.
inline std::vector<std::uint64_t> spf_sieve_segment(std::uint64_t lo, std::uint64_t hi,
                                                    std::size_t max_segment = kDefaultSegmentSize) {
  if (lo < 2) throw ArgumentError("spf_sieve_segment: lo must be >= 2");
  if (hi < lo) throw ArgumentError("spf_sieve_segment: inverted range");
  if (hi > kMaxSpfHi) throw CapacityError("spf_sieve_segment: hi exceeds 10^12");
  if (hi - lo + 1 > max_segment) {
    throw CapacityError("spf_sieve_segment: range longer than the configured segment size");
  }
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::uint64_t> spf(len, 0);
  const auto root = detail::isqrt(hi);
  for (const std::uint64_t p : small_primes()) {
    if (p > root) break;
    const std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
    for (std::uint64_t m = start; m <= hi; m += p) {
      auto& slot = spf[static_cast<std::size_t>(m - lo)];
      if (slot == 0) slot = p;
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (spf[i] == 0) spf[i] = lo + i;  // no factor <= sqrt(hi): prime
  }
  return spf;
}

// ---------------------------------------------------------------------------
// Primality and factorization
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin, exact for every 64-bit input.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  const int s = std::countr_zero(d);
  d >>= s;
  // Base set of Jim Sinclair, valid below 2^64.
  for (std::uint64_t a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    a %= n;
    if (a == 0) continue;
    std::uint64_t x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

namespace detail {

// Pollard rho with Brent's cycle detection and batched gcds. n must be an odd composite.
inline std::uint64_t pollard_brent(std::uint64_t n) {
  constexpr std::uint64_t kBatch = 128;
  for (std::uint64_t c = 1;; ++c) {
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    std::uint64_t y = 2, x = 2, ys = 2, q = 1, g = 1;
    for (std::uint64_t r = 1; g == 1; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(kBatch, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void split_large(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  const std::uint64_t d = pollard_brent(n);
  split_large(d, out);
  split_large(n / d, out);
}

}  // namespace detail

/// One entry of a factorization.
struct PrimePower {
  std::uint64_t prime;
  std::uint32_t exponent;

  bool operator==(const PrimePower&) const = default;
};

/// Prime-power decomposition of a positive integer; primes strictly increasing.
/// The empty list is the factorization of 1.
struct Factorization {
  std::vector<PrimePower> factors;

  bool operator==(const Factorization&) const = default;

  mpz_class value() const {
    mpz_class v = 1;
    for (const auto& [p, e] : factors) {
      mpz_class pe;
      mpz_ui_pow_ui(pe.get_mpz_t(), p, e);
      v *= pe;
    }
    return v;
  }
};

/// Factor 1 <= n < 2^63: trial division by primes up to 10^6, then
/// Miller-Rabin and Pollard-Brent on whatever cofactor remains.
inline Factorization factorize(std::uint64_t n) {
  if (n == 0) throw ArgumentError("factorize: n must be positive");
  if (n >> 63) throw ArgumentError("factorize: n must be below 2^63");
  Factorization result;
  std::uint64_t m = n;
  bool primality_checked = false;
  for (const std::uint64_t p : small_primes()) {
    if (p * p > m) break;
    if (!primality_checked && p > 1000) {
      primality_checked = true;
      if (is_prime_u64(m)) break;
    }
    if (m % p) continue;
    std::uint32_t e = 0;
    do {
      m /= p;
      ++e;
    } while (m % p == 0);
    result.factors.push_back({p, e});
  }
  if (m == 1) return result;
  const std::uint64_t last_trial = small_primes().back();
  if (m <= last_trial * last_trial || is_prime_u64(m)) {
    result.factors.push_back({m, 1});
    return result;
  }
  std::vector<std::uint64_t> large;
  detail::split_large(m, large);
  std::sort(large.begin(), large.end());
  for (const auto q : large) {
    if (!result.factors.empty() && result.factors.back().prime == q) {
      ++result.factors.back().exponent;
    } else {
      result.factors.push_back({q, 1});
    }
  }
  return result;
}

/// Moebius function of a small positive integer.
inline int mobius(std::uint64_t n) {
  int mu = 1;
  for (const auto& [p, e] : factorize(n).factors) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Character mod 4 and primorials
// ---------------------------------------------------------------------------

/// The non-principal Dirichlet character mod 4.
constexpr int chi1(std::int64_t n) {
  const std::int64_t r = ((n % 4) + 4) % 4;
  if (r == 1) return 1;
  if (r == 3) return -1;
  return 0;
}

/// Upper bound for the s-th prime (Rosser), used to size sieves.
inline std::uint64_t nth_prime_upper_bound(std::uint64_t s) {
  if (s < 6) return 13;
  const double x = static_cast<double>(s);
  return static_cast<std::uint64_t>(x * (std::log(x) + std::log(std::log(x)))) + 1;
}

/// The first s primes.
inline std::vector<std::uint32_t> first_primes(std::uint64_t s) {
  auto primes = primes_up_to(nth_prime_upper_bound(s));
  primes.resize(static_cast<std::size_t>(s));
  return primes;
}

/// Product of the first s primes (1 for s = 0).
inline mpz_class primorial(std::uint64_t s) {
  if (s > 100'000) throw CapacityError("primorial: s exceeds 10^5");
  mpz_class result = 1;
  if (s == 0) return result;
  const auto primes = first_primes(s);
  mpz_primorial_ui(result.get_mpz_t(), primes.back());
  return result;
}

}  // namespace totlab
