#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "totlab/arith.hpp"

namespace totlab {

/// Sign in the odd-prime local factor alpha_k(p) = 1 - sign / p^(k/2), k even:
/// sign = (-1)^(k(p-1)/4).
constexpr int alpha_sign(std::uint64_t p, int k) {
  const bool half_k_odd = (k / 2) % 2 != 0;
  const bool half_p_odd = ((p - 1) / 2) % 2 != 0;
  return (half_k_odd && half_p_odd) ? -1 : 1;
}

/// ln alpha_k(p) as a double; 0 for p = 2 or odd k.
inline double log_alpha(std::uint64_t p, int k) {
  if (k % 2 != 0 || p == 2) return 0.0;
  const double inv_pow = std::pow(static_cast<double>(p), -0.5 * k);
  return std::log1p(-alpha_sign(p, k) * inv_pow);
}

/// Run fn(i) for i in [0, count) on up to `threads` workers and return the
/// results indexed by i. The output never depends on the worker count.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> results(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Per-n data of one sieve segment [lo, hi].
struct Segment {
  std::uint64_t lo = 1;
  std::uint64_t hi = 0;
  std::vector<std::uint64_t> phi;      // Euler phi(n)
  std::vector<double> log_phi_ratio;   // ln(phi(n) / n)
  std::vector<double> log_alpha;       // sum of ln alpha_k(p) over odd p | n

  std::size_t size() const { return phi.size(); }
  std::uint64_t n(std::size_t i) const { return lo + i; }
  /// ln(Phi_k(n) / n^k).
  double log_ratio(std::size_t i) const { return log_phi_ratio[i] + log_alpha[i]; }
};

/// Segmented sieve producing phi(n), ln(phi(n)/n) and the alpha_k log-product
/// for every n in [1, limit]. Segments are independent and fixed-size, so
/// any reduction done in segment order is reproducible.
class MultiplicativeSieve {
 public:
  MultiplicativeSieve(std::uint64_t limit, int k, std::size_t segment_size = kDefaultSegmentSize)
      : limit_(limit), k_(k), segment_size_(segment_size) {
    if (k < 1) throw ArgumentError("sieve: k must be >= 1");
    if (segment_size == 0) throw ArgumentError("sieve: segment size must be positive");
    if (limit > kMaxPrimeLimit) throw CapacityError("sieve: limit exceeds 10^9");
    base_ = primes_up_to(detail::isqrt(limit));
    log_one_minus_.reserve(base_.size());
    log_alpha_.reserve(base_.size());
    for (const std::uint64_t p : base_) {
      log_one_minus_.push_back(std::log1p(-1.0 / static_cast<double>(p)));
      log_alpha_.push_back(log_alpha(p, k));
    }
  }

  std::uint64_t limit() const { return limit_; }
  int k() const { return k_; }
  std::size_t segment_count() const {
    return limit_ == 0 ? 0 : static_cast<std::size_t>((limit_ - 1) / segment_size_ + 1);
  }

  Segment segment(std::size_t index) const {
    Segment s;
    s.lo = 1 + static_cast<std::uint64_t>(index) * segment_size_;
    s.hi = std::min<std::uint64_t>(limit_, s.lo + segment_size_ - 1);
    const std::size_t len = static_cast<std::size_t>(s.hi - s.lo + 1);
    std::vector<std::uint64_t> rem(len);
    for (std::size_t i = 0; i < len; ++i) rem[i] = s.lo + i;
    s.phi.assign(len, 1);
    s.log_phi_ratio.assign(len, 0.0);
    s.log_alpha.assign(len, 0.0);

    for (std::size_t b = 0; b < base_.size(); ++b) {
      const std::uint64_t p = base_[b];
      if (p * p > s.hi) break;
      const double l1 = log_one_minus_[b], la = log_alpha_[b];
      for (std::uint64_t m = (s.lo + p - 1) / p * p; m <= s.hi; m += p) {
        const std::size_t i = static_cast<std::size_t>(m - s.lo);
        rem[i] /= p;
        s.phi[i] *= p - 1;
        s.log_phi_ratio[i] += l1;
        s.log_alpha[i] += la;
      }
      for (std::uint64_t pk = p * p; pk <= s.hi; pk *= p) {
        for (std::uint64_t m = (s.lo + pk - 1) / pk * pk; m <= s.hi; m += pk) {
          const std::size_t i = static_cast<std::size_t>(m - s.lo);
          rem[i] /= p;
          s.phi[i] *= p;
        }
        if (pk > s.hi / p) break;
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      const std::uint64_t q = rem[i];
      if (q == 1) continue;  // fully factored by base primes
      s.phi[i] *= q - 1;
      s.log_phi_ratio[i] += std::log1p(-1.0 / static_cast<double>(q));
      s.log_alpha[i] += log_alpha(q, k_);
    }
    return s;
  }

  /// fn(segment) for every segment, results returned in segment order.
  template <class Fn>
  auto map_segments(Fn&& fn, unsigned threads = 1) const {
    return parallel_map(segment_count(), threads, [&](std::size_t i) { return fn(segment(i)); });
  }

  /// Calls fn(segment) sequentially in ascending n; sieving runs on `threads` workers.
  template <class Fn>
  void for_each_segment(Fn&& fn, unsigned threads = 1) const {
    const std::size_t count = segment_count();
    const std::size_t batch = std::max<std::size_t>(1, threads == 0 ? std::thread::hardware_concurrency() : threads);
    for (std::size_t start = 0; start < count; start += batch) {
      const std::size_t n = std::min(batch, count - start);
      auto segments = parallel_map(n, threads, [&](std::size_t i) { return segment(start + i); });
      for (const auto& s : segments) fn(s);
    }
  }

 private:
  std::uint64_t limit_;
  int k_;
  std::size_t segment_size_;
  std::vector<std::uint32_t> base_;
  std::vector<double> log_one_minus_;
  std::vector<double> log_alpha_;
};

}  // namespace totlab
