#include "geocount/gscpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geocount/error.hpp"

namespace geocount {

void GscppParams::validate() const { gspp.validate(); }

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw_out_of_range(std::string(who) + ": t must be finite and >= 0");
  }
}

}  // namespace

MomentTriple gscpp_moments(double t, const GscppParams& p) {
  p.validate();
  check_time(t, "gscpp_moments");
  const UnitMoments d = unit_moments(p.gspp.spp.sub);
  const double lam = p.gspp.spp.lambda;
  const double mu = p.gspp.gcp.mu;
  const double x1 = p.jumps.moment1();
  const double x2 = p.jumps.moment2();
  MomentTriple out;
  if (!d.finite()) {
    out.mean = t == 0.0 ? 0.0 : inf;
    out.variance = out.mean;
    out.cov = [](double s, double u) { return std::min(s, u) == 0.0 ? 0.0 : inf; };
    return out;
  }
  // Unit-time compound variable chi = sum of N^f(1) jumps.
  const double chi_mean = lam * d.mean * x1;
  const double chi_var = lam * d.mean * x2 + lam * lam * x1 * x1 * d.variance;
  out.cov = [mu, chi_mean, chi_var](double s, double u) {
    if (!(s >= 0.0 && u >= 0.0)) throw_out_of_range("cov: times must be >= 0");
    const double lo = std::min(s, u);
    const double hi = std::max(s, u);
    return mu * lo * chi_var + chi_mean * chi_mean * mu * lo * (1.0 + mu * hi);
  };
  out.mean = mu * t * chi_mean;
  out.variance = out.cov(t, t);
  return out;
}

double gscpp_empty_sum_atom(double t, const GscppParams& p) {
  p.validate();
  check_time(t, "gscpp_empty_sum_atom");
  const double f = laplace_exponent(p.gspp.spp.sub, p.gspp.spp.lambda);
  return 1.0 / (1.0 - p.gspp.gcp.mu * t * std::expm1(-f));
}

double gscpp_pmf_discrete(std::uint64_t k, double t, const GscppParams& p,
                          const SeriesControl& ctl, PmfRoute route) {
  p.validate();
  ctl.validate();
  check_time(t, "gscpp_pmf_discrete");
  if (p.jumps.kind() != JumpKind::discrete) {
    throw_invalid("gscpp_pmf_discrete requires a discrete jump law");
  }
  ConvolutionPowers powers(p.jumps, static_cast<double>(k));
  const bool bounded = p.jumps.values()[0] == 0.0;  // then m <= k
  std::size_t K = bounded ? static_cast<std::size_t>(k) + 1 : std::min<std::size_t>(64, ctl.max_terms);
  std::vector<double> count;
  auto fill = [&](std::size_t size) {
    if (route == PmfRoute::derivative) {
      count = gspp_pmf_generic_table(size - 1, t, p.gspp);
    } else {
      for (std::size_t m = count.size(); m < size; ++m) {
        count.push_back(gspp_pmf_conditioning(m, t, p.gspp, ctl).value);
      }
    }
  };
  fill(K);
  CompensatedSum<double> value(ctl.kahan);
  CompensatedSum<double> cumulative(ctl.kahan);
  double bound = 1.0;
  for (std::size_t m = 0;; ++m) {
    if (m >= count.size()) {
      if (bounded) {
        bound = 0.0;
        break;
      }
      if (K >= ctl.max_terms) break;
      K = std::min(2 * K, ctl.max_terms);
      fill(K);
    }
    if (m > 0) powers.advance();
    value.add(count[m] * powers.mass_at(k));
    cumulative.add(count[m]);
    bound = std::max(0.0, 1.0 - cumulative.value()) * powers.cdf(static_cast<double>(k));
    if (!bounded && bound < ctl.abs_tol) break;
  }
  if (bound >= ctl.abs_tol) {
    std::ostringstream msg;
    msg << "gscpp_pmf_discrete: truncated count tail still bounds " << bound;
    throw ConvergenceError(msg.str(), value.value(), bound);
  }
  return value.value();
}

CompoundCdf gscpp_cdf(double y, double t, const GscppParams& p, const SeriesControl& ctl,
                      const CdfOptions& options) {
  p.validate();
  check_time(t, "gscpp_cdf");
  auto table = [&](std::size_t K) { return gspp_pmf_generic_table(K - 1, t, p.gspp); };
  CompoundCdf out = compound_cdf(table, p.jumps, y, ctl);
  if (p.jumps.kind() == JumpKind::grid && p.jumps.step() > options.max_grid_step) {
    std::ostringstream msg;
    msg << "grid step " << p.jumps.step() << " exceeds " << options.max_grid_step
        << "; cdf error is O(step^2)";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double gscpp_sample(double t, const GscppParams& p, RandomStream& rng) {
  p.validate();
  check_time(t, "gscpp_sample");
  if (t == 0.0) return 0.0;
  const std::uint64_t g = gcp_sample_count(t, p.gspp.gcp, rng);
  std::uint64_t n = 0;
  for (std::uint64_t i = 0; i < g; ++i) n += spp_sample(1.0, p.gspp.spp, rng);
  return p.jumps.sample_sum(n, rng);
}

}  // namespace geocount
