#pragma once

// Stochastic oracle for the normalized powered extreme. One uniform per
// maximum: M_n = Phi^{-1}(U^{1/n}), so n = 10^6+ costs the same as n = 10.
// RNG: SplitMix64 (Steele/Lea/Vigna); replications are split into 256 fixed
// partitions whose streams derive from (seed, partition index), and partial
// sums merge in partition order, so results do not depend on thread count
// or scheduling. POWEX_THREADS overrides the worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include "powex/exactdist.hpp"
#include "powex/norming.hpp"
#include "powex/specfun.hpp"

namespace powex {

struct McConfig {
  std::uint64_t n = 2;             // sample size per maximum (integer by contract)
  std::uint64_t replications = 10000;
  std::uint64_t seed = 0;
  double t = 1.0;
};

namespace detail {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform_open() { // (0, 1)
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
};

inline std::uint64_t partition_state(std::uint64_t seed, std::uint64_t p) {
  // one extra SplitMix64 scramble decorrelates the per-partition start states
  SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ull * (p + 1)));
  return mixer.next();
}

inline unsigned worker_count() {
  if (const char* env = std::getenv("POWEX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : (hw > 16 ? 16u : hw);
}

} // namespace detail

// M_n = Phi^{-1}(u^{1/n}) through the complementary path: the upper-tail area
// q = 1 - u^{1/n} is formed with expm1 so u near 1 keeps full precision.
inline double max_from_uniform(double u, std::uint64_t n) {
  if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("max_from_uniform: u must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("max_from_uniform: n must be >= 1");
  const double lu_over_n = std::log(u) / static_cast<double>(n);
  const double q = -std::expm1(lu_over_n); // 1 - u^{1/n}
  if (q <= 0.5) return normal_quantile_complement(q);
  return -normal_quantile_complement(std::exp(lu_over_n));
}

inline std::vector<MomentEstimate> mc_moments(const McConfig& cfg, const NormingScale& s, int r_max) {
  if (cfg.n < 2) throw std::invalid_argument("mc_moments: n must be >= 2");
  if (cfg.replications < 10000) throw std::invalid_argument("mc_moments: replications must be >= 1e4");
  if (r_max < 1 || r_max > 8) throw std::invalid_argument("mc_moments: r_max must lie in 1..8");
  if (s.t != cfg.t) throw std::invalid_argument("mc_moments: power index mismatch between cfg and scale");
  const double ln_n = std::log(static_cast<double>(cfg.n));
  if (std::abs(s.log_n - ln_n) > 1e-9 * std::max(1.0, ln_n))
    throw std::invalid_argument("mc_moments: scale was not built from cfg.n");

  constexpr std::uint64_t kPartitions = 256;
  struct Partial {
    std::vector<double> sum;
    std::vector<double> sumsq;
  };
  std::vector<Partial> partials(kPartitions);
  const std::uint64_t base = cfg.replications / kPartitions;
  const std::uint64_t rem = cfg.replications % kPartitions;

  auto run_partition = [&](std::uint64_t p) {
    detail::SplitMix64 rng(detail::partition_state(cfg.seed, p));
    const std::uint64_t reps = base + (p < rem ? 1 : 0);
    Partial part;
    part.sum.assign(static_cast<std::size_t>(r_max), 0.0);
    part.sumsq.assign(static_cast<std::size_t>(r_max), 0.0);
    for (std::uint64_t i = 0; i < reps; ++i) {
      const double u = rng.uniform_open();
      const double m = max_from_uniform(u, cfg.n);
      const double powered = s.t == 1.0 ? std::abs(m) : std::pow(std::abs(m), s.t);
      const double v = (powered - s.d) / s.c;
      double vr = 1.0;
      for (int r = 1; r <= r_max; ++r) {
        vr *= v;
        part.sum[static_cast<std::size_t>(r - 1)] += vr;
        part.sumsq[static_cast<std::size_t>(r - 1)] += vr * vr;
      }
    }
    partials[p] = std::move(part);
  };

  const unsigned workers = detail::worker_count();
  if (workers <= 1) {
    for (std::uint64_t p = 0; p < kPartitions; ++p) run_partition(p);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::uint64_t p = next.fetch_add(1);
          if (p >= kPartitions) return;
          run_partition(p);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // merge in fixed partition order
  std::vector<double> sum(static_cast<std::size_t>(r_max), 0.0);
  std::vector<double> sumsq(static_cast<std::size_t>(r_max), 0.0);
  for (std::uint64_t p = 0; p < kPartitions; ++p) {
    for (int r = 0; r < r_max; ++r) {
      sum[static_cast<std::size_t>(r)] += partials[p].sum[static_cast<std::size_t>(r)];
      sumsq[static_cast<std::size_t>(r)] += partials[p].sumsq[static_cast<std::size_t>(r)];
    }
  }

  const double N = static_cast<double>(cfg.replications);
  std::vector<MomentEstimate> out;
  out.reserve(static_cast<std::size_t>(r_max));
  for (int r = 1; r <= r_max; ++r) {
    const double mean = sum[static_cast<std::size_t>(r - 1)] / N;
    double var = (sumsq[static_cast<std::size_t>(r - 1)] / N - mean * mean) * (N / (N - 1.0));
    if (var < 0.0) var = 0.0;
    MomentEstimate est;
    est.r = r;
    est.value = mean;
    est.method = MomentEstimate::Method::montecarlo;
    est.std_error = std::sqrt(var / N);
    est.error_bound = est.std_error;
    est.samples = cfg.replications;
    out.push_back(est);
  }
  return out;
}

} // namespace powex
