#include "geocount/spp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "geocount/error.hpp"

namespace geocount {

void SppParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw_out_of_range("lambda must be positive");
}

namespace {

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw_out_of_range(std::string(who) + ": t must be finite and >= 0");
  }
}

constexpr double kNegativeTolerance = -1e-9;

}  // namespace

std::vector<double> spp_pmf_generic_table(std::size_t k_max, double t, const SppParams& p) {
  p.validate();
  check_time(t, "spp_pmf_generic");
  const Jet f = taylor_coeffs_at(p.sub, p.lambda, k_max);
  const Jet e = jet_exp(f * (-t));
  std::vector<double> out(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) out[k] = (k % 2 == 0) ? e[k] : -e[k];
  return out;
}

double spp_pmf_generic(std::uint64_t k, double t, const SppParams& p, const SeriesControl& ctl) {
  ctl.validate();
  const double v = spp_pmf_generic_table(k, t, p)[k];
  if (v < kNegativeTolerance) {
    std::ostringstream msg;
    msg << "spp_pmf_generic: negative probability " << v << " at k=" << k;
    throw ConvergenceError(msg.str(), v, 0.0);
  }
  return v;
}

namespace detail {

quad fractional_kernel(std::uint64_t k, double alpha, double x, const SeriesControl& ctl,
                       SeriesDiagnostic& diag) {
  ctl.validate();
  const quad qa = alpha;
  const quad qx = x;
  CompensatedSum<quad> sum(ctl.kahan);
  quad power = 1;  // (-x)^r / r!
  quad max_term = 0;
  int small_run = 0;
  // Terms only decay once alpha r exceeds k and r exceeds x.
  const double r_floor = std::max(static_cast<double>(k) / alpha, x) + 2.0;
  quad term = 0;
  std::size_t r = 0;
  for (; r < ctl.max_terms; ++r) {
    if (r > 0) power *= -qx / quad(r);
    term = power * generalized_binomial_q(qa * quad(r), static_cast<unsigned>(k));
    sum.add(term);
    const quad mag = abs(term);
    if (mag > max_term) max_term = mag;
    if (mag < ctl.abs_tol) {
      ++small_run;
    } else {
      small_run = 0;
    }
    if (small_run >= 3 && static_cast<double>(r) > r_floor) break;
  }
  diag.terms = r + 1;
  diag.last_term = static_cast<double>(term);
  diag.max_term = static_cast<double>(max_term);
  diag.tail_estimate = static_cast<double>(abs(term));
  diag.converged = r < ctl.max_terms;
  const quad value = sum.value();
  if (!diag.converged) {
    throw ConvergenceError("fractional series did not converge within max_terms",
                           static_cast<double>(value), diag.tail_estimate);
  }
  // Cancellation check: rounding error scales with the largest term.
  const double rounding = static_cast<double>(max_term) *
                          static_cast<double>(std::numeric_limits<quad>::epsilon()) *
                          static_cast<double>(diag.terms);
  if (rounding > ctl.abs_tol) {
    std::ostringstream msg;
    msg << "fractional series lost precision (max term " << diag.max_term
        << "); argument " << x << " is outside the documented regime";
    throw ConvergenceError(msg.str(), static_cast<double>(value), rounding);
  }
  return value;
}

}  // namespace detail

SeriesValue spp_pmf_sfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                 const SeriesControl& ctl) {
  return spp_pmf_tsfpp_series(k, t, lambda, alpha, 0.0, ctl);
}

double spp_pmf_sfpp(std::uint64_t k, double t, double lambda, double alpha,
                    const SeriesControl& ctl) {
  return spp_pmf_sfpp_series(k, t, lambda, alpha, ctl).value;
}

SeriesValue spp_pmf_tsfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                  double nu, const SeriesControl& ctl) {
  check_time(t, "spp_pmf_tsfpp");
  if (!(lambda > 0.0)) throw_out_of_range("lambda must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw_out_of_range("alpha must lie in (0, 1)");
  if (!(nu >= 0.0)) throw_out_of_range("nu must be >= 0");
  SeriesValue out;
  if (t == 0.0) {
    out.value = k == 0 ? 1.0 : 0.0;
    out.diagnostic.converged = true;
    return out;
  }
  const double x = t * std::pow(lambda + nu, alpha);
  const quad kernel = detail::fractional_kernel(k, alpha, x, ctl, out.diagnostic);
  quad scale = (k % 2 == 0) ? quad(1) : quad(-1);
  if (nu > 0.0) {
    const quad ratio = quad(lambda) / (quad(lambda) + quad(nu));
    for (std::uint64_t i = 0; i < k; ++i) scale *= ratio;
    scale *= exp(quad(t) * quad(std::pow(nu, alpha)));
  }
  out.value = static_cast<double>(scale * kernel);
  return out;
}

double spp_pmf_tsfpp(std::uint64_t k, double t, double lambda, double alpha, double nu,
                     const SeriesControl& ctl) {
  return spp_pmf_tsfpp_series(k, t, lambda, alpha, nu, ctl).value;
}

MeanVariance spp_moments(double t, const SppParams& p) {
  p.validate();
  check_time(t, "spp_moments");
  if (t == 0.0) return {0.0, 0.0};
  const UnitMoments m = unit_moments(p.sub);
  if (!m.finite()) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  const double ed = t * m.mean;
  const double vd = t * m.variance;
  return {p.lambda * ed, p.lambda * p.lambda * vd + p.lambda * ed};
}

std::uint64_t spp_sample(double t, const SppParams& p, RandomStream& rng) {
  p.validate();
  check_time(t, "spp_sample");
  if (t == 0.0) return 0;
  const double d = subordinator_sample(p.sub, t, rng);
  return poisson_draw(p.lambda * d, rng);
}

namespace {
constexpr double kExpansionCap = 24.0;
}

std::optional<SingularExpansion> spp_singular_expansion(double t, const SppParams& p,
                                                        double cap) {
  auto f = power_law_exponent_expansion(p.sub, p.lambda, cap);
  if (!f) return std::nullopt;
  return f->scaled(-t).exp();
}

Pmf spp_pmf_adaptive(double t, const SppParams& p, const SeriesControl& ctl) {
  p.validate();
  check_time(t, "spp_pmf_adaptive");
  auto table = [&](std::size_t K) { return spp_pmf_generic_table(K - 1, t, p); };
  return detail::build_adaptive_pmf(table, spp_singular_expansion(t, p, kExpansionCap), ctl);
}

}  // namespace geocount
