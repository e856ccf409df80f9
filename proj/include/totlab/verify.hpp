#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "totlab/analytic.hpp"
#include "totlab/arith.hpp"
#include "totlab/counting.hpp"
#include "totlab/rational.hpp"
#include "totlab/sieve.hpp"
#include "totlab/totient.hpp"

namespace totlab {

inline constexpr double kKernelMaxStep = 0.01;
inline constexpr double kMaxResidueTau = 200.0;
inline constexpr double kPoleClearance = 1e-3;
inline constexpr std::uint64_t kMaxPerronX = 1'000'000ULL;
inline constexpr std::uint64_t kMaxExtremalPrime = 10'000'000ULL;
inline constexpr std::uint64_t kMaterializePrimorialUpTo = 20;

// ---------------------------------------------------------------------------
// Perron kernel
// ---------------------------------------------------------------------------

struct KernelCheck {
  double estimate = 0.0;        // Richardson-extrapolated value
  double trapezoid = 0.0;       // step h
  double trapezoid_coarse = 0.0;  // step 2h
  std::optional<double> bound;  // absent for y = 1
};

namespace detail {

// (1/pi) int_0^T (a cos(L t) + t sin(L t)) / (a^2 + t^2) dt, which is
// y^-a (1/2 pi i) int_{a-iT}^{a+iT} y^s / s ds with L = ln y.
// Returns the trapezoid sums with `intervals` (even) and intervals / 2 panels.
inline std::pair<double, double> kernel_trapezoids(double log_y, double a, double T, std::size_t intervals) {
  const double h = T / static_cast<double>(intervals);
  auto f = [&](double t) { return (a * std::cos(log_y * t) + t * std::sin(log_y * t)) / (a * a + t * t); };
  CompensatedSum odd, even;
  for (std::size_t j = 1; j < intervals; ++j) {
    (j % 2 == 0 ? even : odd).add(f(static_cast<double>(j) * h));
  }
  const double ends = 0.5 * (f(0.0) + f(T));
  const double fine = h * (ends + odd.value() + even.value());
  const double coarse = 2.0 * h * (ends + even.value());
  return {fine / std::numbers::pi, coarse / std::numbers::pi};
}

}  // namespace detail

/// Numerical (1/2 pi i) int_{a-iT}^{a+iT} y^s / s ds against h(y) in {0, 1/2, 1},
/// with the truncation bound y^a / |ln y| * 2 / T.
inline KernelCheck perron_kernel_check(double y, double a, double T) {
  if (!(y > 0.0) || !std::isfinite(y)) throw ArgumentError("perron kernel: y must be positive");
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("perron kernel: a must be positive");
  if (!(T >= 1.0) || !std::isfinite(T)) throw ArgumentError("perron kernel: T must be >= 1");
  auto intervals = static_cast<std::size_t>(std::ceil(T / kKernelMaxStep));
  intervals += intervals % 2;
  const double log_y = std::log(y);
  const auto [fine, coarse] = detail::kernel_trapezoids(log_y, a, T, intervals);
  const double scale = std::pow(y, a);
  KernelCheck out;
  out.trapezoid = scale * fine;
  out.trapezoid_coarse = scale * coarse;
  out.estimate = (4.0 * out.trapezoid - out.trapezoid_coarse) / 3.0;
  if (y != 1.0) out.bound = scale / std::abs(log_y) * 2.0 / T;
  return out;
}

/// h(y) of the kernel: 1 for y > 1, 1/2 at y = 1, 0 below.
constexpr double perron_step(double y) { return y > 1.0 ? 1.0 : (y == 1.0 ? 0.5 : 0.0); }

// ---------------------------------------------------------------------------
// Perron estimate of the count
// ---------------------------------------------------------------------------

enum class PerronMode { EXACT_A, RESIDUE_R };

struct PerronEstimate {
  double estimate = 0.0;  // step 1/steps
  double coarse = 0.0;    // step 2/steps
  double residue_term = 0.0;   // RESIDUE_R only
  double shifted_integral = 0.0;  // RESIDUE_R only
  std::optional<double> shift_abscissa;  // RESIDUE_R: real part d of the shifted line
  std::optional<std::uint64_t> truncation_prime;  // RESIDUE_R
};

namespace detail {

inline std::size_t even_intervals(double length, int steps) {
  auto n = static_cast<std::size_t>(std::ceil(length * steps));
  n = std::max<std::size_t>(n, 2);
  return n + n % 2;
}

// Sum over n of (1/pi) int_0^tau Re(exp((b + i t) L_n) / (b + i t)) dt with the
// phase exp(i t L_n) advanced by rotation and reseeded every 256 steps.
inline PerronEstimate exact_a_integral(const std::vector<double>& logs, double b, double tau, int steps,
                                       unsigned threads) {
  const std::size_t intervals = even_intervals(tau, steps);
  const double h = tau / static_cast<double>(intervals);
  std::vector<double> t(intervals + 1), w(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    t[j] = static_cast<double>(j) * h;
    w[j] = 1.0 / (b * b + t[j] * t[j]);
  }
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (logs.size() + kChunk - 1) / kChunk;
  const auto parts = parallel_map(
      chunks,
      threads,
      [&](std::size_t c) {
        CompensatedSum fine_sum, coarse_sum;
        const std::size_t end = std::min(logs.size(), (c + 1) * kChunk);
        for (std::size_t n = c * kChunk; n < end; ++n) {
          const double L = logs[n];
          const ComplexVal rot = std::polar(1.0, L * h);
          ComplexVal phase = 1.0;
          CompensatedSum odd, even;
          double ends = 0.0;
          for (std::size_t j = 0; j <= intervals; ++j) {
            if (j % 256 == 0) phase = std::polar(1.0, L * t[j]);
            const double f = (b * phase.real() + t[j] * phase.imag()) * w[j];
            if (j == 0 || j == intervals) {
              ends += 0.5 * f;
            } else {
              (j % 2 == 0 ? even : odd).add(f);
            }
            phase *= rot;
          }
          const double scale = std::exp(b * L) / std::numbers::pi;
          fine_sum.add(scale * h * (ends + odd.value() + even.value()));
          coarse_sum.add(scale * 2.0 * h * (ends + even.value()));
        }
        return std::pair{fine_sum.value(), coarse_sum.value()};
      });
  CompensatedSum fine, coarse;
  for (const auto& [f, c] : parts) {
    fine.add(f);
    coarse.add(c);
  }
  PerronEstimate out;
  out.estimate = fine.value();
  out.coarse = coarse.value();
  return out;
}

// x R(z) (alpha x^delta)^z / (z (1 - (1 - delta) z)), alpha = y / x.
struct ShiftedIntegrand {
  const EulerProduct& r;
  double x;
  double log_scale;  // ln(alpha x^delta)
  double one_minus_delta;

  ComplexVal operator()(ComplexVal z) const {
    return x * r(z).value * std::exp(z * log_scale) / (z * (1.0 - one_minus_delta * z));
  }
};

// Abscissa of the shifted line, exp(1/(kappa (c_k s)^(1/4))) or exp(1/(kappa s^(1/2)))
// with s = y x^(delta-1), kept between 1/4 and 4 to the right of the pole.
inline double shift_abscissa(int k, double scale, double pole, double kappa) {
  double d = 0.0;
  if (k % 2 == 0) {
    const double c_k = 1.0 / (1.0 - std::pow(2.0, -0.5 * k));
    d = std::exp(1.0 / (kappa * std::pow(c_k * scale, 0.25)));
  } else {
    d = std::exp(1.0 / (kappa * std::sqrt(scale)));
  }
  return std::clamp(d, pole + 0.25, pole + 4.0);
}

// (1/pi) int_0^tau Re g(c + i t) dt; trapezoid at step h and 2h.
template <class G>
std::pair<double, double> vertical_integral(const G& g, double c, double tau, int steps, unsigned threads) {
  const std::size_t intervals = even_intervals(tau, steps);
  const double h = tau / static_cast<double>(intervals);
  const auto values = parallel_map(intervals + 1, threads,
                                   [&](std::size_t j) { return g(ComplexVal(c, static_cast<double>(j) * h)).real(); });
  CompensatedSum odd, even;
  for (std::size_t j = 1; j < intervals; ++j) (j % 2 == 0 ? even : odd).add(values[j]);
  const double ends = 0.5 * (values.front() + values.back());
  return {h * (ends + odd.value() + even.value()) / std::numbers::pi,
          2.0 * h * (ends + even.value()) / std::numbers::pi};
}

// (1/pi) int_b^d Im g(s + i tau) ds.
template <class G>
std::pair<double, double> horizontal_integral(const G& g, double b, double d, double tau, int steps,
                                              unsigned threads) {
  const std::size_t intervals = even_intervals(d - b, steps);
  const double h = (d - b) / static_cast<double>(intervals);
  const auto values = parallel_map(intervals + 1, threads, [&](std::size_t j) {
    return g(ComplexVal(b + static_cast<double>(j) * h, tau)).imag();
  });
  CompensatedSum odd, even;
  for (std::size_t j = 1; j < intervals; ++j) (j % 2 == 0 ? even : odd).add(values[j]);
  const double ends = 0.5 * (values.front() + values.back());
  return {h * (ends + odd.value() + even.value()) / std::numbers::pi,
          2.0 * h * (ends + even.value()) / std::numbers::pi};
}

}  // namespace detail

struct PerronOptions {
  unsigned threads = 1;
  double r_tol = 1e-6;  // Euler-product tolerance on the contour
  double kappa = Constants{}.kappa;
};

/// Perron estimate of #{n <= x : Phi_k(n)/n^beta <= y} along Re z = b, |Im z| <= tau.
///
/// EXACT_A integrates A_z(x) y^z / z exactly. RESIDUE_R replaces A_z(x) by
/// R_k(z) x^(1-(1-delta)z) / (1-(1-delta)z), moves the line past the pole
/// z0 = 1/(1-delta) and returns R_k(z0) y^z0 plus the shifted contour integral.
inline PerronEstimate perron_count_estimate(int k, const Rational& beta, std::uint64_t x, const Rational& y, double b,
                                            double tau, int steps, PerronMode mode,
                                            const PerronOptions& options = {}) {
  if (k < 1) throw ArgumentError("perron: k must be >= 1");
  if (x < 1) throw ArgumentError("perron: x must be >= 1");
  if (x > kMaxPerronX) throw CapacityError("perron: x exceeds 10^6");
  if (y <= 0) throw ArgumentError("perron: y must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw ArgumentError("perron: b must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("perron: tau must be positive");
  if (steps < 1) throw ArgumentError("perron: steps must be >= 1");
  const double log_y = log_rational(y);

  if (mode == PerronMode::EXACT_A) {
    auto logs = log_ratio_table(k, beta, x, options.threads);
    for (double& v : logs) v = log_y - v;
    return detail::exact_a_integral(logs, b, tau, steps, options.threads);
  }

  const Rational delta = detail::delta_of(k, beta);
  if (delta >= 1) throw ArgumentError("perron: RESIDUE_R needs delta < 1");
  if (tau > kMaxResidueTau) throw ArgumentError("perron: RESIDUE_R needs tau <= 200");
  const double delta_d = delta.get_d();
  const double one_minus = 1.0 - delta_d;
  const double pole = 1.0 / one_minus;
  if (std::abs(b - pole) <= kPoleClearance) throw GeometryError("perron: pole within 10^-3 of the contour");
  const double xd = static_cast<double>(x);
  const double log_scale = log_y - std::log(xd) + delta_d * std::log(xd);

  PerronEstimate out;
  if (b > pole) {
    EulerProduct r(k, 1.0, std::hypot(b, tau), options.r_tol);
    const detail::ShiftedIntegrand g{r, xd, log_scale, one_minus};
    const auto [fine, coarse] = detail::vertical_integral(g, b, tau, steps, options.threads);
    out.estimate = out.shifted_integral = fine;
    out.coarse = coarse;
    out.truncation_prime = r.truncation_prime();
    return out;
  }
  const double d = detail::shift_abscissa(k, std::exp(log_scale), pole, options.kappa);
  EulerProduct r(k, 1.0, std::hypot(d, tau), options.r_tol);
  const detail::ShiftedIntegrand g{r, xd, log_scale, one_minus};
  const auto [v_fine, v_coarse] = detail::vertical_integral(g, d, tau, steps, options.threads);
  const auto [h_fine, h_coarse] = detail::horizontal_integral(g, b, d, tau, steps, options.threads);
  out.residue_term = r_value(k, pole, 1e-10).value.real() * std::exp(pole * log_y);
  out.shifted_integral = v_fine - h_fine;
  out.estimate = out.residue_term + out.shifted_integral;
  out.coarse = out.residue_term + v_coarse - h_coarse;
  out.shift_abscissa = d;
  out.truncation_prime = r.truncation_prime();
  return out;
}

/// (1/2 pi i) int_{b-i tau}^{b+i tau} of the RESIDUE_R integrand without moving the line.
inline PerronEstimate perron_model_line_integral(int k, const Rational& beta, std::uint64_t x, const Rational& y,
                                                 double b, double tau, int steps, const PerronOptions& options = {}) {
  if (k < 1 || x < 1 || y <= 0 || !(b > 0.0) || !(tau > 0.0) || steps < 1) {
    throw ArgumentError("perron line integral: invalid arguments");
  }
  if (tau > kMaxResidueTau) throw ArgumentError("perron line integral: tau must be <= 200");
  const Rational delta = detail::delta_of(k, beta);
  if (delta >= 1) throw ArgumentError("perron line integral: needs delta < 1");
  const double delta_d = delta.get_d();
  const double xd = static_cast<double>(x);
  if (std::abs(b - 1.0 / (1.0 - delta_d)) <= kPoleClearance) throw GeometryError("perron: pole on the contour");
  const double log_scale = log_rational(y) - std::log(xd) + delta_d * std::log(xd);
  EulerProduct r(k, 1.0, std::hypot(b, tau), options.r_tol);
  const detail::ShiftedIntegrand g{r, xd, log_scale, 1.0 - delta_d};
  const auto [fine, coarse] = detail::vertical_integral(g, b, tau, steps, options.threads);
  PerronEstimate out;
  out.estimate = fine;
  out.coarse = coarse;
  out.truncation_prime = r.truncation_prime();
  return out;
}

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

struct VerificationRow {
  TotientParams params;
  std::uint64_t x = 0;
  Rational alpha = 0;
  Rational y = 0;
  std::uint64_t exact_count = 0;
  std::optional<double> main_term;
  std::optional<double> rel_err;
  RegimeLabel regime;
};

/// Main term R_k(1/(1-delta)) y^(1/(1-delta)).
inline double distribution_main_term(int k, const Rational& beta, const Rational& y) {
  const double delta = detail::delta_of(k, beta).get_d();
  const double z0 = 1.0 / (1.0 - delta);
  return r_value(k, z0, 1e-10).value.real() * std::exp(z0 * log_rational(y));
}

/// One row per alpha with y = alpha x. Counts use the phi * alpha_k form,
/// cross-checked against the Phi_k form on every 1000th n.
inline std::vector<VerificationRow> verify_distribution(int k, const Rational& beta, std::uint64_t x,
                                                        const std::vector<Rational>& alphas, unsigned threads = 1,
                                                        const RegimeConfig& config = {}) {
  if (x < 2) throw ArgumentError("verify_distribution: x must be >= 2");
  std::vector<Rational> ys;
  ys.reserve(alphas.size());
  for (const auto& a : alphas) {
    if (a <= 0) throw ArgumentError("verify_distribution: alpha must be positive");
    Rational y = a * static_cast<unsigned long>(x);
    y.canonicalize();
    ys.push_back(y);
  }
  CountOptions opts;
  opts.form = CountForm::ALPHA;
  opts.threads = threads;
  opts.cross_check_stride = 1000;
  const auto counts = count_many(k, beta, x, ys, opts);
  std::vector<VerificationRow> rows;
  rows.reserve(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    VerificationRow row;
    row.params = TotientParams::make(k, beta);
    row.x = x;
    row.alpha = alphas[i];
    row.y = ys[i];
    row.exact_count = counts[i];
    row.regime = classify_regime(k, beta, x, ys[i], config);
    if (has_main_term(row.regime.tag)) {
      const double main = distribution_main_term(k, beta, ys[i]);
      row.main_term = main;
      row.rel_err = std::abs(static_cast<double>(counts[i]) - main) / std::max(main, 1.0);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Extremal orders
// ---------------------------------------------------------------------------

/// liminf of Phi_k(n) lnln n / n^k:
/// e^-gamma for odd k, (2^h/(2^h-1)) e^-gamma / zeta(h) for k = 4m,
/// e^-gamma / L(h, chi_1) for k = 4m+2, with h = k/2.
inline double minimal_constant(int k) {
  if (k < 1) throw ArgumentError("minimal_constant: k must be >= 1");
  const double base = std::exp(-Constants{}.gamma);
  if (k % 2 == 1) return base;
  const int h = k / 2;
  if (k % 4 == 0) {
    const double two_h = std::exp2(h);
    return two_h / (two_h - 1.0) / zeta_real(h) * base;
  }
  return base / l_chi1(h);
}

struct ExtremalRow {
  std::uint64_t s = 0;
  std::uint64_t p_s = 0;
  double log_n_s = 0.0;             // theta(p_s)
  std::optional<mpz_class> n_s;     // materialized for small s only
  double ratio = 0.0;               // Phi_k(n_s) lnln n_s / n_s^k / minimal_constant(k)
};

struct MaxOrderRow {
  std::uint64_t p = 0;
  double ratio = 0.0;        // Phi_k(p) / p^k
  double lower_bound = 0.0;  // 1 - (k+2)/p
};

struct ExtremalReport {
  int k = 1;
  double constant = 0.0;
  std::vector<ExtremalRow> rows;
  std::vector<MaxOrderRow> max_order;
};

/// Primorial rows s = 2..s_max (lnln n_1 < 0) and the maximal-order rows for
/// the ten largest primes <= p_{s_max}.
inline ExtremalReport verify_extremal(int k, std::uint64_t s_max) {
  if (k < 1) throw ArgumentError("verify_extremal: k must be >= 1");
  if (s_max < 2) throw ArgumentError("verify_extremal: s_max must be >= 2");
  if (nth_prime_upper_bound(s_max) > 2 * kMaxExtremalPrime) throw CapacityError("verify_extremal: p_s exceeds 10^7");
  const auto primes = first_primes(s_max);
  if (primes.back() > kMaxExtremalPrime) throw CapacityError("verify_extremal: p_s exceeds 10^7");

  ExtremalReport out;
  out.k = k;
  out.constant = minimal_constant(k);
  out.rows.reserve(primes.size());
  CompensatedSum theta, log_ratio;
  mpz_class n_s = 1;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    const double pd = static_cast<double>(p);
    theta.add(std::log(pd));
    log_ratio.add(std::log1p(-1.0 / pd) + log_alpha(p, k));
    const std::uint64_t s = i + 1;
    if (s <= kMaterializePrimorialUpTo) n_s *= static_cast<unsigned long>(p);
    if (s < 2) continue;
    ExtremalRow row;
    row.s = s;
    row.p_s = p;
    row.log_n_s = theta.value();
    if (s <= kMaterializePrimorialUpTo) row.n_s = n_s;
    row.ratio = std::exp(log_ratio.value()) * std::log(row.log_n_s) / out.constant;
    out.rows.push_back(std::move(row));
  }
  const std::size_t first = primes.size() > 10 ? primes.size() - 10 : 0;
  for (std::size_t i = first; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    const double pd = static_cast<double>(p);
    out.max_order.push_back({p, std::exp(std::log1p(-1.0 / pd) + log_alpha(p, k)), 1.0 - (k + 2.0) / pd});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mertens
// ---------------------------------------------------------------------------

struct MertensRow {
  std::uint64_t x = 0;
  double sum = 0.0;             // sum_{p <= x} 1/p
  double sum_limit = 0.0;       // lnln x + b0
  double product = 0.0;         // prod (1 - 1/p)
  double product_scaled = 0.0;  // product ln x e^gamma, tends to 1
  double product_power = 0.0;   // prod (1 - p^-2)
  double product_power_limit = 0.0;  // 1 / zeta(2)
  double product_chi = 0.0;     // prod (1 - chi_1(p)/p)
  double product_chi_limit = 0.0;    // 1 / L(1, chi_1) = 4/pi

  double sum_deviation() const { return sum - sum_limit; }
  double product_deviation() const { return product_scaled - 1.0; }
  double power_deviation() const { return product_power - product_power_limit; }
  double chi_deviation() const { return product_chi - product_chi_limit; }
};

inline std::vector<MertensRow> verify_mertens(const std::vector<std::uint64_t>& xs, unsigned threads = 1) {
  for (const auto x : xs) {
    if (x < 10) throw ArgumentError("verify_mertens: x must be >= 10");
  }
  const Constants c;
  const double inv_zeta2 = 1.0 / zeta_real(2.0);
  const double inv_l1 = 1.0 / l_chi1(1.0);
  return parallel_map(xs.size(), threads, [&](std::size_t i) {
    const std::uint64_t x = xs[i];
    const double ln_x = std::log(static_cast<double>(x));
    MertensRow row;
    row.x = x;
    row.sum = mertens_sum(x);
    row.sum_limit = std::log(ln_x) + c.meissel_mertens;
    row.product = mertens_product(x);
    row.product_scaled = row.product * ln_x * std::exp(c.gamma);
    row.product_power = mertens_product_power(x, 2);
    row.product_power_limit = inv_zeta2;
    row.product_chi = mertens_product_chi(x, 1);
    row.product_chi_limit = inv_l1;
    return row;
  });
}

}  // namespace totlab
