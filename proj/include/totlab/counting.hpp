#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "totlab/analytic.hpp"
#include "totlab/arith.hpp"
#include "totlab/rational.hpp"
#include "totlab/sieve.hpp"
#include "totlab/totient.hpp"

namespace totlab {

inline constexpr unsigned kMaxBetaDenominator = 64;
inline constexpr double kGuardBand = 1e-9;
inline constexpr std::uint64_t kMaxBatemanY = 10'000'000ULL;

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

enum class Regime { THM3_MAIN, THM4_BOUND, THM5_BOUND, THM6_MAIN, THM7_MAIN, THM7_BOUND, TRIVIAL_FULL, TRIVIAL_EMPTY };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::THM3_MAIN: return "THM3_MAIN";
    case Regime::THM4_BOUND: return "THM4_BOUND";
    case Regime::THM5_BOUND: return "THM5_BOUND";
    case Regime::THM6_MAIN: return "THM6_MAIN";
    case Regime::THM7_MAIN: return "THM7_MAIN";
    case Regime::THM7_BOUND: return "THM7_BOUND";
    case Regime::TRIVIAL_FULL: return "TRIVIAL_FULL";
    case Regime::TRIVIAL_EMPTY: return "TRIVIAL_EMPTY";
  }
  return "?";
}

/// Regimes that come with an asymptotic main term.
constexpr bool has_main_term(Regime r) {
  return r == Regime::THM3_MAIN || r == Regime::THM6_MAIN || r == Regime::THM7_MAIN;
}

struct RegimeLabel {
  Regime tag = Regime::THM6_MAIN;
  std::optional<double> threshold_y;
};

/// Constants used by the thresholds. c_k defaults to 1/(1 - 2^(-k/2)) for
/// even k and 1 for odd k.
struct RegimeConfig {
  double epsilon = 0.01;
  double kappa = Constants{}.kappa;
  std::optional<double> c_k;

  double c_k_for(int k) const {
    if (c_k) return *c_k;
    return (k % 2 == 0) ? 1.0 / (1.0 - std::pow(2.0, -0.5 * k)) : 1.0;
  }
};

namespace detail {

inline Rational delta_of(int k, const Rational& beta) {
  Rational d = beta - (k - 1);
  d.canonicalize();
  return d;
}

}  // namespace detail

/// Upper end of the main-term range for 0 < delta < 1:
/// (ln(1/(1-delta) + eps))^-4 / (c_k kappa^4) * x^(1-delta).
inline double main_term_threshold(int k, double delta, double x, const RegimeConfig& config = {}) {
  const double inner = std::log(1.0 / (1.0 - delta) + config.epsilon);
  const double kappa4 = std::pow(config.kappa, 4);
  return std::pow(inner, -4.0) / (config.c_k_for(k) * kappa4) * std::pow(x, 1.0 - delta);
}

/// Regime of (k, beta, x, y). delta >= 1 lies outside every regime.
inline RegimeLabel classify_regime(int k, const Rational& beta, std::uint64_t x, const Rational& y,
                                   const RegimeConfig& config = {}) {
  if (k < 1) throw ArgumentError("classify_regime: k must be >= 1");
  if (x < 2) throw ArgumentError("classify_regime: x must be >= 2");
  if (y <= 0) throw ArgumentError("classify_regime: y must be positive");
  const Rational delta = detail::delta_of(k, beta);
  if (delta >= 1) throw ArgumentError("classify_regime: delta = beta - (k-1) must be < 1");
  const double xd = static_cast<double>(x);

  // n = 1 has ratio 1 and every other n has ratio >= 1 when delta <= 0.
  if (delta <= 0 && y < 1) return {Regime::TRIVIAL_EMPTY, std::nullopt};
  if (delta == 0) return {Regime::THM6_MAIN, std::nullopt};

  if (delta > 0) {
    const double threshold = main_term_threshold(k, delta.get_d(), xd, config);
    if (y > Rational(static_cast<unsigned long>(x))) return {Regime::TRIVIAL_FULL, threshold};
    if (y.get_d() <= threshold) return {Regime::THM3_MAIN, threshold};
    return {Regime::THM4_BOUND, threshold};
  }

  if (y < Rational(static_cast<unsigned long>(x))) return {Regime::THM5_BOUND, std::nullopt};

  // x (ln x lnln x)^(1/2) < e^(1-delta) y^(1/(1-delta) - 1/ln x), in logarithms.
  const double one_minus = 1.0 - delta.get_d();
  const double ln_x = std::log(xd);
  const double spread = ln_x * std::log(ln_x);
  const double lhs = ln_x + (spread > 0.0 ? 0.5 * std::log(spread) : -HUGE_VAL);
  const double slope = 1.0 / one_minus - 1.0 / ln_x;
  const bool holds = lhs < one_minus + slope * log_rational(y);
  std::optional<double> threshold;
  if (slope > 0.0 && std::isfinite(lhs)) threshold = std::exp((lhs - one_minus) / slope);
  return {holds ? Regime::THM7_MAIN : Regime::THM7_BOUND, threshold};
}

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

/// PHI_K compares Phi_k(n) / n^beta with y; ALPHA compares
/// phi(n) alpha_k(n) / n^delta with y. Both decide the same inequality.
enum class CountForm { PHI_K, ALPHA };

struct CountOptions {
  CountForm form = CountForm::PHI_K;
  unsigned threads = 1;
  std::size_t segment_size = kDefaultSegmentSize;
  // When nonzero, every n divisible by this stride is also decided with the
  // other form and a disagreement raises PrecisionError.
  std::uint64_t cross_check_stride = 0;
};

struct CountRecord {
  int k = 1;
  Rational beta = 0;
  std::uint64_t x = 0;
  Rational y = 0;
  std::uint64_t count = 0;
  std::optional<RegimeLabel> regime;
};

namespace detail {

inline void check_beta(const Rational& beta) {
  if (beta.get_den() > kMaxBetaDenominator) throw ArgumentError("beta must have denominator <= 64");
}

// x^e with e possibly negative folded into (lhs, rhs) so both stay integral.
inline void multiply_power(mpz_class& lhs, mpz_class& rhs, std::uint64_t n, const mpz_class& exponent) {
  if (exponent == 0) return;
  mpz_class power;
  const unsigned long e = mpz_class(abs(exponent)).get_ui();
  mpz_ui_pow_ui(power.get_mpz_t(), n, e);
  if (exponent > 0) {
    rhs *= power;
  } else {
    lhs *= power;
  }
}

// Exact test of Phi_k(n) / n^(p/q) <= u/v:  (Phi_k(n) v)^q <= u^q n^p.
inline bool exact_leq_phi_form(std::uint64_t n, int k, const Rational& beta, const Rational& y) {
  const unsigned long q = beta.get_den().get_ui();
  mpz_class lhs = phi_k(n, k) * y.get_den();
  mpz_class rhs = y.get_num();
  mpz_pow_ui(lhs.get_mpz_t(), lhs.get_mpz_t(), q);
  mpz_pow_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), q);
  multiply_power(lhs, rhs, n, beta.get_num());
  return lhs <= rhs;
}

// Exact test of phi(n) alpha_k(n) / n^delta <= y with alpha_k(n) = A/B.
inline bool exact_leq_alpha_form(std::uint64_t n, int k, const Rational& delta, const Rational& y) {
  const unsigned long q = delta.get_den().get_ui();
  mpz_class phi = 1, a_num = 1, a_den = 1;
  for (const auto& [p, e] : factorize(n).factors) {
    mpz_class pe;
    mpz_ui_pow_ui(pe.get_mpz_t(), p, e - 1);
    phi *= pe * (p - 1);
    if (k % 2 == 0 && p != 2) {
      const Rational a = alpha_k(p, k);
      a_num *= a.get_num();
      a_den *= a.get_den();
    }
  }
  mpz_class lhs = phi * a_num * y.get_den();
  mpz_class rhs = y.get_num() * a_den;
  mpz_pow_ui(lhs.get_mpz_t(), lhs.get_mpz_t(), q);
  mpz_pow_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), q);
  multiply_power(lhs, rhs, n, delta.get_num());
  return lhs <= rhs;
}

struct Threshold {
  Rational y;
  double log_y = 0.0;
  bool positive = false;
};

// Log of the ratio for entry i of a segment under the chosen form.
inline double log_ratio_value(const Segment& seg, std::size_t i, int k, double beta, double delta, CountForm form) {
  const double ln_n = std::log(static_cast<double>(seg.n(i)));
  if (form == CountForm::PHI_K) return seg.log_ratio(i) + (k - beta) * ln_n;
  return std::log(static_cast<double>(seg.phi[i])) + seg.log_alpha[i] - delta * ln_n;
}

}  // namespace detail

/// Counts #{n <= x : ratio(n) <= y} for every y at once; results follow the input order.
inline std::vector<std::uint64_t> count_many(int k, const Rational& beta, std::uint64_t x,
                                             const std::vector<Rational>& ys, const CountOptions& options = {}) {
  if (k < 1) throw ArgumentError("count: k must be >= 1");
  if (x > kMaxRange) throw CapacityError("count: x exceeds 10^8");
  detail::check_beta(beta);
  const Rational delta = detail::delta_of(k, beta);
  const double beta_d = beta.get_d(), delta_d = delta.get_d();

  std::vector<std::size_t> order(ys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });
  std::vector<detail::Threshold> sorted;
  sorted.reserve(ys.size());
  for (const std::size_t i : order) {
    const bool pos = ys[i] > 0;
    sorted.push_back({ys[i], pos ? log_rational(ys[i]) : -HUGE_VAL, pos});
  }
  std::vector<double> log_ys(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) log_ys[i] = sorted[i].log_y;

  auto exact = [&](CountForm form, std::uint64_t n, const Rational& y) {
    return form == CountForm::PHI_K ? detail::exact_leq_phi_form(n, k, beta, y)
                                    : detail::exact_leq_alpha_form(n, k, delta, y);
  };
  auto decide = [&](CountForm form, double v, std::uint64_t n, const detail::Threshold& t) {
    if (!t.positive) return false;
    const double gap = v - t.log_y;
    if (gap > kGuardBand) return false;
    if (gap < -kGuardBand) return true;
    return exact(form, n, t.y);
  };
  const CountForm other = options.form == CountForm::PHI_K ? CountForm::ALPHA : CountForm::PHI_K;

  std::vector<std::uint64_t> sorted_counts(sorted.size(), 0);
  if (x >= 1 && !sorted.empty()) {
    MultiplicativeSieve sieve(x, k, options.segment_size);
    const auto partial = sieve.map_segments(
        [&](const Segment& seg) {
          // diff[j] counts n whose first qualifying threshold is j.
          std::vector<std::uint64_t> diff(sorted.size() + 1, 0);
          for (std::size_t i = 0; i < seg.size(); ++i) {
            const std::uint64_t n = seg.n(i);
            const double v = detail::log_ratio_value(seg, i, k, beta_d, delta_d, options.form);
            // Thresholds below the band never qualify; above it always do.
            std::size_t j = static_cast<std::size_t>(
                std::lower_bound(log_ys.begin(), log_ys.end(), v - kGuardBand) - log_ys.begin());
            while (j < sorted.size() && sorted[j].log_y <= v + kGuardBand) {
              if (decide(options.form, v, n, sorted[j])) break;
              ++j;
            }
            ++diff[j];
            if (options.cross_check_stride != 0 && n % options.cross_check_stride == 0) {
              const double w = detail::log_ratio_value(seg, i, k, beta_d, delta_d, other);
              for (std::size_t t = 0; t < sorted.size(); ++t) {
                if (decide(other, w, n, sorted[t]) != (t >= j)) {
                  throw PrecisionError("count: forms disagree at n = " + std::to_string(n));
                }
              }
            }
          }
          return diff;
        },
        options.threads);
    std::vector<std::uint64_t> diff(sorted.size() + 1, 0);
    for (const auto& d : partial) {
      for (std::size_t j = 0; j < d.size(); ++j) diff[j] += d[j];
    }
    std::uint64_t running = 0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      running += diff[j];
      sorted_counts[j] = running;
    }
  }
  std::vector<std::uint64_t> counts(ys.size());
  for (std::size_t i = 0; i < order.size(); ++i) counts[order[i]] = sorted_counts[i];
  return counts;
}

/// #{n <= x : Phi_k(n) / n^beta <= y}.
inline CountRecord count_phi_ratio(int k, const Rational& beta, std::uint64_t x, const Rational& y,
                                   const CountOptions& options = {}, const RegimeConfig& config = {}) {
  if (x < 1) throw ArgumentError("count: x must be >= 1");
  if (y <= 0) throw ArgumentError("count: y must be positive");
  CountRecord rec{k, beta, x, y, count_many(k, beta, x, {y}, options)[0], std::nullopt};
  if (x >= 2 && detail::delta_of(k, beta) < 1) rec.regime = classify_regime(k, beta, x, y, config);
  return rec;
}

/// Exact rational value of a finite double.
inline Rational exact_rational(double v) {
  if (!std::isfinite(v)) throw ArgumentError("value must be finite");
  Rational r(v);
  r.canonicalize();
  return r;
}

struct CdfPoint {
  double alpha = 0.0;
  std::uint64_t count = 0;
  double fraction = 0.0;
};

/// f(alpha) = (1/x) #{n <= x : Phi_k(n) / n^k <= alpha} on the given grid.
inline std::vector<CdfPoint> empirical_cdf(int k, std::uint64_t x, const std::vector<double>& grid,
                                           const CountOptions& options = {}) {
  if (x < 1) throw ArgumentError("cdf: x must be >= 1");
  std::vector<Rational> ys;
  ys.reserve(grid.size());
  for (const double a : grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw ArgumentError("cdf: grid values must lie in [0, 1]");
    ys.push_back(exact_rational(a));
  }
  const auto counts = count_many(k, Rational(k), x, ys, options);
  std::vector<CdfPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back({grid[i], counts[i], static_cast<double>(counts[i]) / static_cast<double>(x)});
  }
  return out;
}

/// ln(Phi_k(n) / n^beta) for n = 1..x, in order.
inline std::vector<double> log_ratio_table(int k, const Rational& beta, std::uint64_t x, unsigned threads = 1) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (x > kMaxRange) throw CapacityError("x exceeds 10^8");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(x));
  const double beta_d = beta.get_d();
  MultiplicativeSieve(x, k).for_each_segment(
      [&](const Segment& seg) {
        for (std::size_t i = 0; i < seg.size(); ++i) {
          out.push_back(detail::log_ratio_value(seg, i, k, beta_d, 0.0, CountForm::PHI_K));
        }
      },
      threads);
  return out;
}

/// A_z(x) = sum_{n <= x} (Phi_k(n) / n^beta)^-z.
inline ComplexVal summatory_A(int k, const Rational& beta, ComplexVal z, std::uint64_t x, unsigned threads = 1) {
  if (k < 1) throw ArgumentError("summatory_A: k must be >= 1");
  if (x > kMaxRange) throw CapacityError("summatory_A: x exceeds 10^8");
  if (x == 0) return 0.0;
  const double beta_d = beta.get_d();
  MultiplicativeSieve sieve(x, k);
  const auto partial = sieve.map_segments(
      [&](const Segment& seg) {
        CompensatedComplexSum sum;
        for (std::size_t i = 0; i < seg.size(); ++i) {
          sum.add(std::exp(-z * detail::log_ratio_value(seg, i, k, beta_d, 0.0, CountForm::PHI_K)));
        }
        return sum.value();
      },
      threads);
  CompensatedComplexSum total;
  for (const auto& v : partial) total.add(v);
  return total.value();
}

// ---------------------------------------------------------------------------
// Bateman's M(y)
// ---------------------------------------------------------------------------

struct BatemanResult {
  std::uint64_t y = 0;
  std::uint64_t count = 0;
  std::uint64_t cutoff = 0;             // X: all m with phi(m) <= y satisfy m <= X
  std::uint64_t certificate_min_phi = 0;  // min phi(m) over X < m <= 2X
};

/// M(y) = #{m : phi(m) <= y}. The scan stops at X once min phi on (X, 2X] exceeds y
/// and phi(m) > m / (e^gamma lnln m + 3/lnln m) > y holds from 2X on.
inline BatemanResult bateman_count(std::uint64_t y, unsigned threads = 1) {
  if (y < 1) throw ArgumentError("bateman: y must be >= 1");
  if (y > kMaxBatemanY) throw CapacityError("bateman: y exceeds 10^7");
  const double yd = static_cast<double>(y);
  auto cutoff = static_cast<std::uint64_t>(std::ceil(8.0 * yd * std::log(std::log(yd + 16.0)))) + 100;
  const double eg = std::exp(Constants{}.gamma);
  while (true) {
    const std::uint64_t top = 2 * cutoff;
    if (top > kMaxPrimeLimit) throw CapacityError("bateman: certificate cutoff exceeds 10^9");
    const double t = static_cast<double>(top);
    const double llt = std::log(std::log(t));
    const bool beyond = t / (eg * llt + 3.0 / llt) > yd;
    struct Part {
      std::uint64_t count = 0;
      std::uint64_t min_phi = UINT64_MAX;
    };
    MultiplicativeSieve sieve(top, 1);
    const auto parts = sieve.map_segments(
        [&](const Segment& seg) {
          Part part;
          for (std::size_t i = 0; i < seg.size(); ++i) {
            const std::uint64_t m = seg.n(i), phi = seg.phi[i];
            if (m <= cutoff) {
              part.count += phi <= y;
            } else {
              part.min_phi = std::min(part.min_phi, phi);
            }
          }
          return part;
        },
        threads);
    BatemanResult out{y, 0, cutoff, UINT64_MAX};
    for (const auto& p : parts) {
      out.count += p.count;
      out.certificate_min_phi = std::min(out.certificate_min_phi, p.min_phi);
    }
    if (beyond && out.certificate_min_phi > y) return out;
    cutoff *= 2;
  }
}

}  // namespace totlab
