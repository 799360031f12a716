#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "geocount/random.hpp"

namespace geocount {

/// Monte Carlo estimate checked against a closed-form target.
struct McReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double target = 0.0;
  double k_se = 3.0;
  bool pass = false;
  /// All draws equal although the target law is not degenerate.
  bool degenerate = false;
};

/// |estimate - target| <= k_se * std_error (exact equality when std_error is 0).
bool mc_verdict(double estimate, double std_error, double target, double k_se);

/// One-line text form: estimate, stderr, n, target, verdict.
std::string render(const McReport& r);

struct McOptions {
  std::size_t n = 100'000;
  std::uint64_t seed = 1;
  double k_se = 3.0;
  std::size_t threads = 0;  // 0: hardware concurrency
};

using RealSampler = std::function<double(RandomStream&)>;
using CountSampler = std::function<std::uint64_t(RandomStream&)>;
using EventSampler = std::function<bool(RandomStream&)>;

/// Sample mean with standard error s / sqrt(n). `target_variance` > 0 marks
/// a constant sample as degenerate.
McReport mc_mean(const RealSampler& sampler, double target, const McOptions& opt,
                 double target_variance = 0.0);

/// Sample variance with a normal-theory standard error
/// sqrt((m4 - s^4 (n-3)/(n-1)) / n).
McReport mc_variance(const RealSampler& sampler, double target, const McOptions& opt);

/// Event frequency with standard error sqrt(p(1-p)/n).
McReport mc_proportion(const EventSampler& sampler, double target, const McOptions& opt);

/// Total-variation distance between the empirical law and `pmf` (k = 0..K);
/// mass beyond K is lumped into one cell on both sides.
double mc_pmf_tv(const CountSampler& sampler, std::span<const double> pmf, const McOptions& opt);

struct BandResult {
  bool pass = false;
  std::vector<double> points;  // evaluation points (pilot-sample quantiles)
  std::vector<McReport> reports;
};

/// Empirical cdf against `cdf` at points chosen as quantiles of an
/// independent pilot sample; each point passes within k_se binomial SEs.
BandResult mc_cdf_band(const RealSampler& sampler, const std::function<double(double)>& cdf,
                       std::span<const double> levels, const McOptions& opt);

/// Empirical Laplace transform E[e^{-s X}] with its standard error.
McReport mc_laplace(const RealSampler& sampler, double s, double target, const McOptions& opt);

namespace detail {

inline constexpr std::size_t kChunkSize = 1024;

/// Splits n draws into fixed chunks, each with its own derived stream, and
/// returns the per-chunk results in chunk order. The result does not depend
/// on the number of threads.
template <class R, class ChunkFn>
std::vector<R> run_chunks(std::size_t n, std::uint64_t seed, std::size_t threads, ChunkFn&& fn) {
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<R> out(chunks);
  auto work = [&](std::size_t c) {
    RandomStream rng = RandomStream::derive(seed, c);
    const std::size_t count = std::min(kChunkSize, n - c * kChunkSize);
    out[c] = fn(count, rng);
  };
  std::size_t workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) work(c);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = next++; c < chunks; c = next++) work(c);
      } catch (...) {
        errors[w] = std::current_exception();
        next = chunks;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace detail

}  // namespace geocount
