#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "totlab/arith.hpp"
#include "totlab/rational.hpp"
#include "totlab/sieve.hpp"

namespace totlab {

inline constexpr std::uint64_t kMaxRange = 100'000'000ULL;
inline constexpr std::uint64_t kBruteForceBudget = 100'000'000ULL;

/// (k, beta, delta) with delta = beta - (k - 1) held exactly.
struct TotientParams {
  int k = 1;
  Rational beta = 0;
  Rational delta = 0;

  static TotientParams make(int k, const Rational& beta) {
    if (k < 1) throw ArgumentError("k must be >= 1");
    TotientParams p{k, beta, beta - (k - 1)};
    p.delta.canonicalize();
    return p;
  }
};

/// Local factor alpha_k(p) = 1 - (-1)^(k(p-1)/4) / p^(k/2) for odd primes p and
/// even k; alpha_k(2) = 1.
inline Rational alpha_k(std::uint64_t p, int k) {
  if (k < 2 || k % 2 != 0) throw ArgumentError("alpha_k: k must be even and positive");
  if (!is_prime_u64(p)) throw ArgumentError("alpha_k: p must be prime");
  if (p == 2) return 1;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), p, static_cast<unsigned long>(k / 2));
  Rational a(power - alpha_sign(p, k), power);
  a.canonicalize();
  return a;
}

/// Phi_k(n) from a factorization via multiplicativity:
/// Phi_k(p^e) = p^(k(e-1)) * p^(k-1) * (p - 1) * alpha_k(p), written without fractions.
inline mpz_class phi_k(const Factorization& fac, int k) {
  if (k < 1) throw ArgumentError("phi_k: k must be >= 1");
  mpz_class result = 1;
  for (const auto& [p, e] : fac.factors) {
    mpz_class local;
    mpz_ui_pow_ui(local.get_mpz_t(), p, static_cast<unsigned long>(k) * e - 1);
    local *= p - 1;
    if (k % 2 == 0 && p != 2) {
      // p^(k-1) * alpha_k(p) = p^(k/2 - 1) * (p^(k/2) - sign)
      mpz_class half;
      mpz_ui_pow_ui(half.get_mpz_t(), p, static_cast<unsigned long>(k / 2));
      local /= half;
      local *= half - alpha_sign(p, k);
    }
    result *= local;
  }
  return result;
}

/// Phi_k(n): number of k-tuples over Z/nZ whose sum of squares is a unit mod n.
inline mpz_class phi_k(std::uint64_t n, int k) { return phi_k(factorize(n), k); }

/// Phi_k(n) by enumerating all n^k tuples. Guarded to n^k <= 10^8.
inline mpz_class phi_k_brute(std::uint64_t n, int k) {
  if (n == 0) throw ArgumentError("phi_k_brute: n must be positive");
  if (k < 1) throw ArgumentError("phi_k_brute: k must be >= 1");
  std::uint64_t cost = 1;
  for (int i = 0; i < k; ++i) {
    if (cost > kBruteForceBudget / n) throw CapacityError("phi_k_brute: n^k exceeds 10^8");
    cost *= n;
  }
  const auto m = static_cast<std::uint32_t>(n);
  std::vector<std::uint32_t> square(m);
  std::vector<std::uint8_t> unit(m);
  for (std::uint32_t x = 0; x < m; ++x) {
    square[x] = static_cast<std::uint32_t>(std::uint64_t{x} * x % m);
    unit[x] = std::gcd(x, m) == 1;  // gcd(0, 1) = 1
  }
  const int outer = k - 1;
  std::vector<std::uint32_t> digit(outer, 0), prefix(outer, 0);
  std::uint64_t count = 0;
  while (true) {
    const std::uint32_t base = outer > 0 ? prefix[outer - 1] : 0;
    for (std::uint32_t x = 0; x < m; ++x) {
      std::uint32_t s = base + square[x];
      if (s >= m) s -= m;
      count += unit[s];
    }
    int j = outer - 1;
    while (j >= 0 && ++digit[j] == m) digit[j--] = 0;
    if (j < 0) break;
    for (int i = j; i < outer; ++i) {
      std::uint32_t s = (i > 0 ? prefix[i - 1] : 0) + square[digit[i]];
      prefix[i] = s >= m ? s - m : s;
    }
  }
  return mpz_class(static_cast<unsigned long>(count));
}

/// Euler's phi.
inline mpz_class euler_phi(std::uint64_t n) { return phi_k(factorize(n), 1); }

/// Jordan's totient J_k(n) = n^k prod_{p | n} (1 - p^-k).
inline mpz_class jordan_j(std::uint64_t n, int k) {
  if (k < 1) throw ArgumentError("jordan_j: k must be >= 1");
  mpz_class result = 1;
  for (const auto& [p, e] : factorize(n).factors) {
    mpz_class pk, local;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(k));
    mpz_ui_pow_ui(local.get_mpz_t(), p, static_cast<unsigned long>(k) * (e - 1));
    result *= local * (pk - 1);
  }
  return result;
}

/// One entry of phi_k_range.
struct TotientValue {
  std::uint64_t n = 1;
  double log_ratio = 0.0;               // ln Phi_k(n) - k ln n
  std::optional<mpz_class> phi_k;       // present when materialization was requested
};

struct RangeOptions {
  bool materialize = false;
  unsigned threads = 1;
  std::size_t segment_size = kDefaultSegmentSize;
};

/// Streams TotientValue for n = 1..x in ascending order to fn.
template <class Fn>
void phi_k_range(std::uint64_t x, int k, Fn&& fn, const RangeOptions& options = {}) {
  if (x < 1) throw ArgumentError("phi_k_range: x must be >= 1");
  if (x > kMaxRange) throw CapacityError("phi_k_range: x exceeds 10^8");
  MultiplicativeSieve sieve(x, k, options.segment_size);
  sieve.for_each_segment(
      [&](const Segment& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          TotientValue v{s.n(i), s.log_ratio(i), std::nullopt};
          if (options.materialize) v.phi_k = phi_k(v.n, k);
          fn(v);
        }
      },
      options.threads);
}

}  // namespace totlab
