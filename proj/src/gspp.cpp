#include "geocount/gspp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "geocount/error.hpp"

namespace geocount {

void GsppParams::validate() const {
  spp.validate();
  gcp.validate();
}

namespace {

constexpr double kNegativeTolerance = -1e-9;
constexpr double kTermGuard = 1e280;
constexpr double kExpansionCap = 24.0;
constexpr double inf = std::numeric_limits<double>::infinity();

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw_out_of_range(std::string(who) + ": t must be finite and >= 0");
  }
}

void check_stable_params(double lambda, double alpha, double mu) {
  if (!(lambda > 0.0)) throw_out_of_range("lambda must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw_out_of_range("alpha must lie in (0, 1)");
  if (!(mu > 0.0)) throw_out_of_range("mu must be positive");
}

// Jet of 1 / (1 + mu t (1 - exp(-f(lambda u)))) around u = 1.
Jet gspp_pgf_jet(std::size_t order, double t, const GsppParams& p) {
  const Jet f = taylor_coeffs_at(p.spp.sub, p.spp.lambda, order);
  const Jet e = jet_exp(f * -1.0);
  const double mt = p.gcp.mu * t;
  return jet_reciprocal(jet_scale_add(e, -mt, 1.0 + mt));
}

// Number of terms after which the envelope rho^r r^k of a series decays.
double decay_floor(std::uint64_t k, double rho, std::size_t max_terms) {
  const double rate = std::max(-std::log(rho), 1e-3);
  return std::min(static_cast<double>(k) / rate + 2.0, static_cast<double>(max_terms));
}

void precision_check(const char* who, const SeriesDiagnostic& d, double value,
                     const SeriesControl& ctl) {
  const double rounding = d.max_term *
                          static_cast<double>(std::numeric_limits<quad>::epsilon()) *
                          static_cast<double>(d.terms);
  if (rounding > ctl.abs_tol) {
    std::ostringstream msg;
    msg << who << ": cancellation exceeds tolerance (max term " << d.max_term << ")";
    throw ConvergenceError(msg.str(), value, rounding);
  }
}

[[noreturn]] void throw_term_overflow(const char* who, std::size_t r, double partial) {
  std::ostringstream msg;
  msg << who << ": term " << r << " exceeds 1e280; use the generic jet evaluator";
  throw Error(ErrorCode::overflow, msg.str() + " (partial sum " + std::to_string(partial) + ")");
}

// Outer driver for series of the form sum_r coef(r) * a_r(y), where a_r are
// scaled geometric polynomials. Recomputes the polynomials in doubling blocks.
template <class CoefFn>
SeriesValue geometric_polynomial_series(const char* who, std::uint64_t k, quad y, double rho,
                                        const SeriesControl& ctl, CoefFn&& coef) {
  SeriesValue out;
  CompensatedSum<quad> sum(ctl.kahan);
  const double r_floor = decay_floor(k, rho, ctl.max_terms);
  std::size_t block = std::min<std::size_t>(256, ctl.max_terms);
  std::vector<quad> a = scaled_geometric_polynomials(block, y);
  quad max_term = 0;
  quad term = 0;
  int small_run = 0;
  std::size_t r = 0;
  bool done = false;
  for (; r < ctl.max_terms; ++r) {
    if (r >= a.size()) {
      block = std::min(2 * block, ctl.max_terms);
      a = scaled_geometric_polynomials(block, y);
    }
    term = coef(r) * a[r];
    const quad mag = abs(term);
    if (!(mag < kTermGuard)) throw_term_overflow(who, r, static_cast<double>(sum.value()));
    sum.add(term);
    if (mag > max_term) max_term = mag;
    small_run = mag < ctl.abs_tol ? small_run + 1 : 0;
    if (small_run >= 3 && static_cast<double>(r) > r_floor) {
      done = true;
      break;
    }
  }
  auto& d = out.diagnostic;
  d.terms = done ? r + 1 : r;
  d.last_term = static_cast<double>(term);
  d.max_term = static_cast<double>(max_term);
  d.tail_estimate = std::abs(d.last_term);
  d.converged = done;
  out.value = static_cast<double>(sum.value());
  if (!done) {
    throw ConvergenceError(std::string(who) + ": no convergence within max_terms", out.value,
                           d.tail_estimate);
  }
  precision_check(who, d, out.value, ctl);
  return out;
}

}  // namespace

double gspp_pgf(double z, double t, const GsppParams& p) {
  p.validate();
  check_time(t, "gspp_pgf");
  if (!(z >= 0.0 && z <= 1.0)) throw_out_of_range("gspp_pgf: z must lie in [0, 1]");
  const double f = laplace_exponent(p.spp.sub, p.spp.lambda * (1.0 - z));
  return 1.0 / (1.0 - p.gcp.mu * t * std::expm1(-f));
}

std::vector<double> gspp_pmf_generic_table(std::size_t k_max, double t, const GsppParams& p) {
  p.validate();
  check_time(t, "gspp_pmf_generic");
  const Jet g = gspp_pgf_jet(k_max, t, p);
  std::vector<double> out(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) out[k] = (k % 2 == 0) ? g[k] : -g[k];
  return out;
}

double gspp_pmf_generic(std::uint64_t k, double t, const GsppParams& p,
                        const SeriesControl& ctl, std::size_t jet_order) {
  ctl.validate();
  const std::size_t order = std::max<std::size_t>(k, jet_order);
  const double v = gspp_pmf_generic_table(order, t, p)[k];
  if (v < kNegativeTolerance) {
    std::ostringstream msg;
    msg << "gspp_pmf_generic: negative probability " << v << " at k=" << k;
    throw ConvergenceError(msg.str(), v, 0.0);
  }
  return v;
}

SeriesValue gspp_pmf_conditioning(std::uint64_t k, double t, double mu,
                                  const std::function<double(std::uint64_t, double)>& spp_pmf,
                                  const SeriesControl& ctl) {
  ctl.validate();
  check_time(t, "gspp_pmf_conditioning");
  const GcpParams g{mu};
  g.validate();
  SeriesValue out;
  const double mt = mu * t;
  const double ratio = mt / (1.0 + mt);
  CompensatedSum<double> sum(ctl.kahan);
  double tail = 1.0;  // P[G >= n]
  std::size_t n = 0;
  for (; n < ctl.max_terms; ++n) {
    const double w = gcp_pmf(n, t, g);
    const double v = n == 0 ? (k == 0 ? 1.0 : 0.0) : spp_pmf(k, static_cast<double>(n));
    sum.add(w * v);
    out.diagnostic.max_term = std::max(out.diagnostic.max_term, w * v);
    out.diagnostic.last_term = w * v;
    tail *= ratio;
    if (tail < ctl.abs_tol) break;
  }
  out.value = sum.value();
  out.diagnostic.terms = n + 1;
  out.diagnostic.tail_estimate = tail;
  out.diagnostic.converged = tail < ctl.abs_tol;
  if (!out.diagnostic.converged) {
    throw ConvergenceError("gspp_pmf_conditioning: geometric tail above tolerance", out.value,
                           tail);
  }
  return out;
}

SeriesValue gspp_pmf_conditioning(std::uint64_t k, double t, const GsppParams& p,
                                  const SeriesControl& ctl) {
  p.validate();
  auto spp_pmf = [&](std::uint64_t j, double s) { return spp_pmf_generic(j, s, p.spp, ctl); };
  return gspp_pmf_conditioning(k, t, p.gcp.mu, spp_pmf, ctl);
}

bool gspp_sfpp_in_region(double t, double lambda, double alpha, double mu) {
  const double mt = mu * t;
  if (mt == 0.0) return true;
  return std::pow(lambda, alpha) < std::log1p(1.0 / mt);
}

SeriesValue gspp_pmf_sfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                 double mu, const SeriesControl& ctl) {
  ctl.validate();
  check_time(t, "gspp_pmf_sfpp");
  check_stable_params(lambda, alpha, mu);
  const double mt = mu * t;
  if (mt == 0.0) {
    SeriesValue out;
    out.value = k == 0 ? 1.0 : 0.0;
    out.diagnostic.converged = true;
    return out;
  }
  if (!gspp_sfpp_in_region(t, lambda, alpha, mu)) {
    std::ostringstream msg;
    msg << "gspp_pmf_sfpp: lambda^alpha = " << std::pow(lambda, alpha)
        << " must be below log(1 + 1/(mu t)) = " << std::log1p(1.0 / mt)
        << "; use the generic jet evaluator";
    throw RegionError(msg.str());
  }
  const double la = std::pow(lambda, alpha);
  const double rho = la / std::log1p(1.0 / mt);
  const quad qa = alpha;
  const quad step = -quad(la);
  quad power = 1;
  std::size_t last_r = 0;
  auto coef = [&](std::size_t r) {
    // Powers are advanced incrementally; r visits 0, 1, 2, ... in order.
    if (r > last_r) {
      power *= step;
      last_r = r;
    }
    return power * generalized_binomial_q(qa * quad(r), static_cast<unsigned>(k));
  };
  SeriesValue out = geometric_polynomial_series("gspp_pmf_sfpp", k, quad(mt), rho, ctl, coef);
  if (k % 2 == 1) out.value = -out.value;
  return out;
}

double gspp_pmf_sfpp(std::uint64_t k, double t, double lambda, double alpha, double mu,
                     const SeriesControl& ctl) {
  return gspp_pmf_sfpp_series(k, t, lambda, alpha, mu, ctl).value;
}

namespace {

struct TemperedSetup {
  double denom;  // 1 + mu t (1 - e^{nu^a})
  double y;      // e^{nu^a} mu t / denom
};

TemperedSetup tempered_setup(double t, double alpha, double nu, double mu) {
  const double mt = mu * t;
  const double denom = 1.0 - mt * std::expm1(std::pow(nu, alpha));
  return {denom, std::exp(std::pow(nu, alpha)) * mt / denom};
}

std::string tempered_region_message(double t, double lambda, double alpha, double nu,
                                    double mu) {
  const auto s = tempered_setup(t, alpha, nu, mu);
  std::ostringstream msg;
  msg << "gspp_pmf_tsfpp: parameters outside the double-series region (requires "
         "e^{nu^a} mu t < 1 + mu t, nu < lambda and (lambda+nu)^a < log(1+1/y); got denom="
      << s.denom << ", y=" << s.y << ", nu/lambda=" << nu / lambda
      << "); use RegionPolicy::fallback or the generic evaluator";
  return msg.str();
}

}  // namespace

bool gspp_tsfpp_in_region(double t, double lambda, double alpha, double nu, double mu) {
  if (mu * t == 0.0) return true;
  if (!(nu < lambda)) return false;
  const auto s = tempered_setup(t, alpha, nu, mu);
  if (!(s.denom > 0.0)) return false;
  return std::pow(lambda + nu, alpha) < std::log1p(1.0 / s.y);
}

SeriesValue gspp_pmf_tsfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                  double nu, double mu, const SeriesControl& ctl,
                                  RegionPolicy policy) {
  ctl.validate();
  check_time(t, "gspp_pmf_tsfpp");
  check_stable_params(lambda, alpha, mu);
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw_out_of_range("nu must be >= 0");
  if (mu * t == 0.0) {
    SeriesValue out;
    out.value = k == 0 ? 1.0 : 0.0;
    out.diagnostic.converged = true;
    return out;
  }
  if (nu == 0.0) return gspp_pmf_sfpp_series(k, t, lambda, alpha, mu, ctl);
  if (!gspp_tsfpp_in_region(t, lambda, alpha, nu, mu)) {
    if (policy == RegionPolicy::throw_error) {
      throw RegionError(tempered_region_message(t, lambda, alpha, nu, mu));
    }
    const GsppParams p{{lambda, SubordinatorSpec::tempered_stable(alpha, nu)}, {mu}};
    return gspp_pmf_conditioning(k, t, p, ctl);
  }
  const auto setup = tempered_setup(t, alpha, nu, mu);
  const double rho = std::pow(lambda + nu, alpha) / std::log1p(1.0 / setup.y);
  const quad qa = alpha;
  const quad ratio = quad(nu) / quad(lambda);
  const quad ql = lambda;

  // Inner m-sum: lambda^{a r} sum_m binom(a r, m) (nu/lambda)^m binom(a r - m, k).
  auto inner = [&](std::size_t r) -> quad {
    const quad ar = qa * quad(r);
    CompensatedSum<quad> s(ctl.kahan);
    quad bin = 1;  // binom(a r, m)
    quad rp = 1;   // (nu/lambda)^m
    quad peak = 0;
    int small_run = 0;
    const double m_floor = alpha * static_cast<double>(r) + static_cast<double>(k) + 2.0;
    std::size_t m = 0;
    for (; m < ctl.max_terms; ++m) {
      if (m > 0) {
        bin *= (ar - quad(m - 1)) / quad(m);
        rp *= ratio;
      }
      const quad term = bin * rp * generalized_binomial_q(ar - quad(m), static_cast<unsigned>(k));
      s.add(term);
      const quad mag = abs(term);
      if (mag > peak) peak = mag;
      small_run = (mag <= peak * quad(1e-27) || mag == 0) ? small_run + 1 : 0;
      if (small_run >= 3 && static_cast<double>(m) > m_floor) break;
    }
    if (m >= ctl.max_terms) {
      throw ConvergenceError("gspp_pmf_tsfpp: inner series did not converge",
                             static_cast<double>(s.value()), static_cast<double>(peak));
    }
    return exp(ar * log(ql)) * s.value();
  };
  auto coef = [&](std::size_t r) {
    const quad c = inner(r);
    return (r % 2 == 0) ? c : -c;
  };
  SeriesValue out =
      geometric_polynomial_series("gspp_pmf_tsfpp", k, quad(setup.y), rho, ctl, coef);
  out.value /= setup.denom;
  if (k % 2 == 1) out.value = -out.value;
  return out;
}

double gspp_pmf_tsfpp(std::uint64_t k, double t, double lambda, double alpha, double nu,
                      double mu, const SeriesControl& ctl, RegionPolicy policy) {
  return gspp_pmf_tsfpp_series(k, t, lambda, alpha, nu, mu, ctl, policy).value;
}

MomentTriple gspp_moments(double t, const GsppParams& p) {
  p.validate();
  check_time(t, "gspp_moments");
  const UnitMoments m = unit_moments(p.spp.sub);
  const double lam = p.spp.lambda;
  const double mu = p.gcp.mu;
  MomentTriple out;
  if (!m.finite()) {
    out.mean = t == 0.0 ? 0.0 : inf;
    out.variance = out.mean;
    out.cov = [](double s, double u) { return std::min(s, u) == 0.0 ? 0.0 : inf; };
    return out;
  }
  const double first = lam * mu * (lam * m.second_moment + m.mean);
  const double second = mu * mu * lam * lam * m.mean * m.mean;
  out.cov = [first, second](double s, double u) {
    if (!(s >= 0.0 && u >= 0.0)) throw_out_of_range("cov: times must be >= 0");
    const double lo = std::min(s, u);
    return first * lo + second * s * u;
  };
  out.mean = lam * mu * t * m.mean;
  out.variance = out.cov(t, t);
  return out;
}

MomentTriple gspp_moments_tempered(double t, double lambda, double alpha, double nu,
                                   double mu) {
  check_time(t, "gspp_moments_tempered");
  check_stable_params(lambda, alpha, mu);
  if (!(nu > 0.0)) throw_out_of_range("nu must be positive");
  const double a = lambda * alpha * std::pow(nu, alpha - 1.0);
  const double b = lambda * lambda * alpha * (1.0 - alpha) * std::pow(nu, alpha - 2.0);
  const double c = lambda * lambda * alpha * alpha * std::pow(nu, 2.0 * (alpha - 1.0));
  MomentTriple out;
  out.cov = [a, b, c, mu](double s, double u) {
    if (!(s >= 0.0 && u >= 0.0)) throw_out_of_range("cov: times must be >= 0");
    const double lo = std::min(s, u);
    return a * mu * lo + b * mu * lo + c * (mu * lo + mu * mu * s * u);
  };
  out.mean = a * mu * t;
  out.variance = a * mu * t + b * mu * t + c * mu * t * (1.0 + mu * t);
  return out;
}

std::uint64_t gspp_sample(double t, const GsppParams& p, RandomStream& rng) {
  p.validate();
  check_time(t, "gspp_sample");
  if (t == 0.0) return 0;
  const std::uint64_t g = gcp_sample_count(t, p.gcp, rng);
  std::uint64_t n = 0;
  for (std::uint64_t i = 0; i < g; ++i) n += spp_sample(1.0, p.spp, rng);
  return n;
}

std::optional<SingularExpansion> gspp_singular_expansion(double t, const GsppParams& p,
                                                         double cap) {
  auto f = power_law_exponent_expansion(p.spp.sub, p.spp.lambda, cap);
  if (!f) return std::nullopt;
  const SingularExpansion one_minus_e =
      SingularExpansion::constant(cap, 1.0) + f->scaled(-1.0).exp().scaled(-1.0);
  return one_minus_e.reciprocal_one_plus(p.gcp.mu * t);
}

Pmf gspp_pmf_adaptive(double t, const GsppParams& p, const SeriesControl& ctl) {
  p.validate();
  check_time(t, "gspp_pmf_adaptive");
  auto table = [&](std::size_t K) { return gspp_pmf_generic_table(K - 1, t, p); };
  return detail::build_adaptive_pmf(table, gspp_singular_expansion(t, p, kExpansionCap), ctl);
}

double first_passage_survival(std::uint64_t k, double s, const GsppParams& p,
                              const SeriesControl& ctl) {
  if (k == 0) throw_out_of_range("first passage level k must be >= 1");
  check_time(s, "first_passage_survival");
  const auto* stable = p.spp.sub.get<StableFamily>();
  const double lam = p.spp.lambda;
  const double mu = p.gcp.mu;
  if (stable && gspp_sfpp_in_region(s, lam, stable->alpha, mu)) {
    try {
      CompensatedSum<double> sum(ctl.kahan);
      for (std::uint64_t j = 0; j < k; ++j) {
        sum.add(gspp_pmf_sfpp(j, s, lam, stable->alpha, mu, ctl));
      }
      return sum.value();
    } catch (const ConvergenceError&) {
      // Too close to the region boundary; the jet below is always stable.
    }
  }
  const auto table = gspp_pmf_generic_table(k - 1, s, p);
  CompensatedSum<double> sum(ctl.kahan);
  for (double v : table) sum.add(v);
  return sum.value();
}

namespace {

double first_passage_closed_form(std::uint64_t k, double s, const GsppParams& p,
                                 const SeriesControl& ctl) {
  const auto* stable = p.spp.sub.get<StableFamily>();
  if (!stable) throw_invalid("closed-form first passage requires the stable family");
  const double lam = p.spp.lambda;
  const double alpha = stable->alpha;
  const double mu = p.gcp.mu;
  if (!gspp_sfpp_in_region(s, lam, alpha, mu)) {
    throw RegionError("closed-form first passage: lambda^alpha >= log(1 + 1/(mu s))");
  }
  const double la = std::pow(lam, alpha);
  const double rho = la / std::log1p(1.0 / (mu * s));
  const double r_floor = decay_floor(k, rho, ctl.max_terms);
  const quad y = mu * s;
  std::size_t count = std::min<std::size_t>(256, ctl.max_terms);
  CompensatedSum<quad> sum(ctl.kahan);
  for (;;) {
    const auto a = scaled_geometric_polynomials(count, y);
    const auto da = scaled_geometric_polynomial_derivatives(a, y);
    CompensatedSum<quad> attempt(ctl.kahan);
    quad power = 1;
    int small_run = 0;
    bool done = false;
    for (std::size_t r = 0; r < count; ++r) {
      if (r > 0) power *= -quad(la);
      // sum_{j<k} (-1)^j binom(a r, j)
      quad partial = 0;
      for (std::uint64_t j = 0; j < k; ++j) {
        const quad b = generalized_binomial_q(quad(alpha) * quad(r), static_cast<unsigned>(j));
        partial += (j % 2 == 0) ? b : -b;
      }
      const quad term = partial * power * da[r];
      attempt.add(term);
      small_run = abs(term) < ctl.abs_tol ? small_run + 1 : 0;
      if (small_run >= 3 && static_cast<double>(r) > r_floor) {
        done = true;
        break;
      }
    }
    if (done) {
      sum = attempt;
      break;
    }
    if (count >= ctl.max_terms) {
      throw ConvergenceError("closed-form first passage did not converge",
                             static_cast<double>(attempt.value()), 0.0);
    }
    count = std::min(2 * count, ctl.max_terms);
  }
  return -mu * static_cast<double>(sum.value());
}

}  // namespace

double first_passage_density(std::uint64_t k, double s, const GsppParams& p,
                             const SeriesControl& ctl, FirstPassageMethod method) {
  p.validate();
  ctl.validate();
  if (k == 0) throw_out_of_range("first passage level k must be >= 1");
  if (!(s > 0.0) || !std::isfinite(s)) throw_out_of_range("first passage time s must be > 0");
  if (method == FirstPassageMethod::closed_form_series) {
    return first_passage_closed_form(k, s, p, ctl);
  }
  const double h = 1e-3 * s;
  const double sp2 = first_passage_survival(k, s + 2 * h, p, ctl);
  const double sp1 = first_passage_survival(k, s + h, p, ctl);
  const double sm1 = first_passage_survival(k, s - h, p, ctl);
  const double sm2 = first_passage_survival(k, s - 2 * h, p, ctl);
  const double derivative = (-sp2 + 8.0 * sp1 - 8.0 * sm1 + sm2) / (12.0 * h);
  const double density = -derivative;
  if (density < -1e-7) {
    std::ostringstream msg;
    msg << "first_passage_density: negative density " << density << " at s=" << s;
    throw ConvergenceError(msg.str(), density, 0.0);
  }
  return std::max(density, 0.0);
}

double dispersion_index(double t, double lambda, double alpha, double nu, double mu) {
  check_time(t, "dispersion_index");
  check_stable_params(lambda, alpha, mu);
  if (!(nu > 0.0)) throw_out_of_range("nu must be positive");
  return 1.0 + lambda * (1.0 - alpha) / nu +
         lambda * alpha * std::pow(nu, alpha - 1.0) * (1.0 + mu * t);
}

double correlation(const MomentTriple& at_s, const MomentTriple& at_t, double s, double t) {
  return at_t.cov(s, t) / std::sqrt(at_s.variance * at_t.variance);
}

double correlation(double s, double t, const GsppParams& p) {
  return correlation(gspp_moments(s, p), gspp_moments(t, p), s, t);
}

double correlation_limit(double s, const GsppParams& p) {
  const UnitMoments m = unit_moments(p.spp.sub);
  if (!m.finite()) throw Error(ErrorCode::unsupported, "correlation needs finite moments");
  const auto ms = gspp_moments(s, p);
  return p.gcp.mu * p.spp.lambda * s * m.mean / std::sqrt(ms.variance);
}

double correlation_asymptote_poisson(double s, double lambda, double mu) {
  if (!(s > 0.0 && lambda > 0.0 && mu > 0.0)) throw_out_of_range("s, lambda, mu must be > 0");
  return s * (1.0 + lambda) /
         (std::sqrt(lambda * mu) * std::sqrt(s * (1.0 + lambda + lambda * mu * s)));
}

double correlation_asymptote_tempered(double s, double lambda, double alpha, double nu,
                                      double mu) {
  if (!(s > 0.0)) throw_out_of_range("s must be > 0");
  check_stable_params(lambda, alpha, mu);
  if (!(nu > 0.0)) throw_out_of_range("nu must be positive");
  const double num = s * (1.0 + lambda * (1.0 - alpha) / nu +
                          alpha * lambda * std::pow(nu, alpha - 1.0));
  const double inner = std::pow(nu, alpha - 1.0) * s +
                       lambda * (1.0 - alpha) * std::pow(nu, alpha - 2.0) * s +
                       lambda * alpha * std::pow(nu, 2.0 * (alpha - 1.0)) * s * (1.0 + mu * s);
  return num / (std::sqrt(lambda * alpha * mu) * std::sqrt(inner));
}

}  // namespace geocount
