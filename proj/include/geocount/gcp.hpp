#pragma once

#include <cstdint>
#include <vector>

#include "geocount/numerics.hpp"
#include "geocount/pmf.hpp"
#include "geocount/random.hpp"

namespace geocount {

/// Geometric counting process intensity.
struct GcpParams {
  double mu;

  void validate() const;
};

/// A right-continuous counting path on [0, horizon].
struct CountPath {
  std::vector<double> event_times;  // strictly increasing, all <= horizon
  double horizon = 0.0;

  std::uint64_t count_at(double t) const;
};

struct MeanVariance {
  double mean;
  double variance;
};

/// P[G(t) = k] = (1/(1+mu t)) (mu t/(1+mu t))^k.
double gcp_pmf(std::uint64_t k, double t, const GcpParams& p);

/// pmf up to the point where the remaining geometric tail is below abs_tol.
Pmf gcp_pmf_table(double t, const GcpParams& p, const SeriesControl& ctl = {});

MeanVariance gcp_moments(double t, const GcpParams& p);

/// Cov[G(s), G(t)] = mu s (1 + mu t) for s <= t.
double gcp_cov(double s, double t, const GcpParams& p);

/// Exact path law via the mixed-Poisson construction: draw the rate from an
/// exponential law with mean mu, then a homogeneous Poisson path.
CountPath gcp_sample_path(const GcpParams& p, double horizon, RandomStream& rng);

/// Marginal draw of G(t) from the geometric law. Correct for a single time
/// only; use gcp_sample_path for joint behaviour.
std::uint64_t gcp_sample_count(double t, const GcpParams& p, RandomStream& rng);

/// Poisson draw that stays usable for very large means.
std::uint64_t poisson_draw(double mean, RandomStream& rng);

}  // namespace geocount
