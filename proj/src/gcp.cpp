#include "geocount/gcp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "geocount/error.hpp"

namespace geocount {

double Pmf::stored_mass() const {
  CompensatedSum<double> s;
  for (double v : values) s.add(v);
  return s.value();
}

void GcpParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw_out_of_range("mu must be positive");
}

std::uint64_t CountPath::count_at(double t) const {
  return static_cast<std::uint64_t>(
      std::upper_bound(event_times.begin(), event_times.end(), t) - event_times.begin());
}

double gcp_pmf(std::uint64_t k, double t, const GcpParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw_out_of_range("gcp_pmf: t must be >= 0");
  const double mt = p.mu * t;
  if (mt == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::pow(mt / (1.0 + mt), static_cast<double>(k)) / (1.0 + mt);
}

Pmf gcp_pmf_table(double t, const GcpParams& p, const SeriesControl& ctl) {
  ctl.validate();
  p.validate();
  Pmf out;
  const double mt = p.mu * t;
  const double ratio = mt / (1.0 + mt);
  double tail = 1.0;
  for (std::size_t k = 0; k < ctl.max_terms; ++k) {
    const double v = gcp_pmf(k, t, p);
    out.values.push_back(v);
    tail *= ratio;  // P[G >= k+1] = ratio^{k+1}
    if (tail < ctl.abs_tol) {
      out.converged = true;
      break;
    }
  }
  out.tail_mass = tail;
  out.tail_method = TailMethod::geometric_ratio;
  return out;
}

MeanVariance gcp_moments(double t, const GcpParams& p) {
  p.validate();
  if (!(t >= 0.0)) throw_out_of_range("gcp_moments: t must be >= 0");
  const double mt = p.mu * t;
  return {mt, mt * (1.0 + mt)};
}

double gcp_cov(double s, double t, const GcpParams& p) {
  p.validate();
  if (!(s >= 0.0)) throw_out_of_range("gcp_cov: s must be >= 0");
  if (s > t) throw_invalid("gcp_cov: requires s <= t");
  return p.mu * s * (1.0 + p.mu * t);
}

std::uint64_t poisson_draw(double mean, RandomStream& rng) {
  if (!(mean > 0.0)) return 0;
  if (mean < 1e9) {
    std::poisson_distribution<long long> d(mean);
    return static_cast<std::uint64_t>(d(rng.engine()));
  }
  // Normal approximation; relative error of the law is O(mean^{-1/2}).
  const double x = std::round(mean + std::sqrt(mean) * rng.normal());
  if (x >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::max(0.0, x));
}

CountPath gcp_sample_path(const GcpParams& p, double horizon, RandomStream& rng) {
  p.validate();
  if (!(horizon > 0.0)) throw_out_of_range("gcp_sample_path: horizon must be > 0");
  CountPath path;
  path.horizon = horizon;
  const double rate = p.mu * rng.exponential();
  const std::uint64_t n = poisson_draw(rate * horizon, rng);
  path.event_times.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) path.event_times.push_back(horizon * rng.uniform_open());
  std::sort(path.event_times.begin(), path.event_times.end());
  return path;
}

std::uint64_t gcp_sample_count(double t, const GcpParams& p, RandomStream& rng) {
  p.validate();
  if (!(t >= 0.0)) throw_out_of_range("gcp_sample_count: t must be >= 0");
  if (t == 0.0) return 0;
  std::geometric_distribution<std::uint64_t> g(1.0 / (1.0 + p.mu * t));
  return g(rng.engine());
}

}  // namespace geocount
