#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "geocount/gcp.hpp"
#include "geocount/numerics.hpp"
#include "geocount/pmf.hpp"
#include "geocount/random.hpp"
#include "geocount/spp.hpp"

namespace geocount {

/// Subordinated Poisson process observed on the clock of a geometric
/// counting process, N^f(G(t)).
struct GsppParams {
  SppParams spp;
  GcpParams gcp;

  void validate() const;
};

/// Mean, variance and covariance function (0 <= s <= t, symmetric).
struct MomentTriple {
  double mean = 0.0;
  double variance = 0.0;
  std::function<double(double, double)> cov;
};

/// What a series evaluator does outside its validity region.
enum class RegionPolicy { throw_error, fallback };

/// pgf E[z^N(t)] = 1 / (1 + mu t (1 - exp(-f(lambda (1 - z))))), z in [0, 1].
double gspp_pgf(double z, double t, const GsppParams& p);

/// Jet route. The jet order is max(k, jet_order).
double gspp_pmf_generic(std::uint64_t k, double t, const GsppParams& p,
                        const SeriesControl& ctl = {}, std::size_t jet_order = 32);
std::vector<double> gspp_pmf_generic_table(std::size_t k_max, double t, const GsppParams& p);

/// Conditioning oracle  sum_n P[G(t) = n] spp_pmf(k, n), truncated where the
/// geometric tail drops below abs_tol.
SeriesValue gspp_pmf_conditioning(std::uint64_t k, double t, double mu,
                                  const std::function<double(std::uint64_t, double)>& spp_pmf,
                                  const SeriesControl& ctl = {});
/// Same, with the jet pmf of the subordinated process.
SeriesValue gspp_pmf_conditioning(std::uint64_t k, double t, const GsppParams& p,
                                  const SeriesControl& ctl = {});

/// True when lambda^alpha < log(1 + 1/(mu t)), where the stable-case series
/// in scaled geometric polynomials converges.
bool gspp_sfpp_in_region(double t, double lambda, double alpha, double mu);

/// Stable subordinator:
///   (-1)^k sum_r binom(alpha r, k) (-lambda^alpha)^r w_r(mu t) / r!.
/// Throws RegionError outside the convergence region and ConvergenceError
/// (overflow code) if a term exceeds 1e280.
SeriesValue gspp_pmf_sfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                 double mu, const SeriesControl& ctl = {});
double gspp_pmf_sfpp(std::uint64_t k, double t, double lambda, double alpha, double mu,
                     const SeriesControl& ctl = {});

/// Validity of the tempered double series: e^{nu^a} mu t < 1 + mu t,
/// nu < lambda and (lambda+nu)^a < log(1 + 1/y) with y the polynomial argument.
bool gspp_tsfpp_in_region(double t, double lambda, double alpha, double nu, double mu);

/// Tempered stable double series in (r, m). With RegionPolicy::fallback an
/// out-of-region call is answered by the conditioning sum instead.
SeriesValue gspp_pmf_tsfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                  double nu, double mu, const SeriesControl& ctl = {},
                                  RegionPolicy policy = RegionPolicy::throw_error);
double gspp_pmf_tsfpp(std::uint64_t k, double t, double lambda, double alpha, double nu,
                      double mu, const SeriesControl& ctl = {},
                      RegionPolicy policy = RegionPolicy::throw_error);

/// Moments from the unit-time subordinator moments; +inf entries when they
/// are not finite.
MomentTriple gspp_moments(double t, const GsppParams& p);
/// Explicit tempered stable forms.
MomentTriple gspp_moments_tempered(double t, double lambda, double alpha, double nu,
                                   double mu);

/// Compound draw: geometric G(t), then G iid copies of N^f(1).
std::uint64_t gspp_sample(double t, const GsppParams& p, RandomStream& rng);

/// Adaptive pmf with tail diagnostics (see spp_pmf_adaptive).
Pmf gspp_pmf_adaptive(double t, const GsppParams& p, const SeriesControl& ctl = {});
std::optional<SingularExpansion> gspp_singular_expansion(double t, const GsppParams& p,
                                                         double cap);

enum class FirstPassageMethod {
  numerical_derivative,  // 5-point stencil on the survival function
  closed_form_series,    // term-wise derivative of the stable-case series
};

/// Density of the first time the process reaches level k.
double first_passage_density(std::uint64_t k, double s, const GsppParams& p,
                             const SeriesControl& ctl = {},
                             FirstPassageMethod method = FirstPassageMethod::numerical_derivative);

/// P[T_k > s] = P[N(s) < k].
double first_passage_survival(std::uint64_t k, double s, const GsppParams& p,
                              const SeriesControl& ctl = {});

/// Var/mean for tempered stable: 1 + lambda(1-a)/nu + lambda a nu^{a-1}(1 + mu t).
double dispersion_index(double t, double lambda, double alpha, double nu, double mu);

/// Corr[N(s), N(t)] from a moment triple.
double correlation(const MomentTriple& at_s, const MomentTriple& at_t, double s, double t);
double correlation(double s, double t, const GsppParams& p);

/// lim_{t->inf} Corr[N(t), N(s)] = mu lambda s E[D(1)] / sqrt(Var N(s)).
double correlation_limit(double s, const GsppParams& p);

/// Closed-form large-t limit of Corr * t for f(s) = s.
double correlation_asymptote_poisson(double s, double lambda, double mu);
/// Closed-form large-t limit of Corr * t for the tempered stable case.
double correlation_asymptote_tempered(double s, double lambda, double alpha, double nu,
                                      double mu);

}  // namespace geocount
