#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geocount/asymptotic_tail.hpp"
#include "geocount/gcp.hpp"
#include "geocount/numerics.hpp"
#include "geocount/pmf.hpp"
#include "geocount/random.hpp"
#include "geocount/subordinator.hpp"

namespace geocount {

/// Poisson process with rate lambda run on the clock of a subordinator.
struct SppParams {
  double lambda;
  SubordinatorSpec sub;

  void validate() const;
};

/// P[N^f(t) = k] from the jet of exp(-t f(lambda u)) at u = 1.
double spp_pmf_generic(std::uint64_t k, double t, const SppParams& p,
                       const SeriesControl& ctl = {});

/// P[N^f(t) = k] for k = 0..k_max from a single jet.
std::vector<double> spp_pmf_generic_table(std::size_t k_max, double t, const SppParams& p);

/// Stable subordinator closed-form series,
///   ((-1)^k) sum_r (-lambda^alpha t)^r / r! * binom(alpha r, k).
SeriesValue spp_pmf_sfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                 const SeriesControl& ctl = {});
double spp_pmf_sfpp(std::uint64_t k, double t, double lambda, double alpha,
                    const SeriesControl& ctl = {});

/// Tempered stable closed-form series,
///   e^{t nu^a} (-p)^k sum_m (-t (lambda+nu)^a)^m / m! binom(a m, k),
/// p = lambda / (lambda + nu). nu = 0 is the stable case.
SeriesValue spp_pmf_tsfpp_series(std::uint64_t k, double t, double lambda, double alpha,
                                  double nu, const SeriesControl& ctl = {});
double spp_pmf_tsfpp(std::uint64_t k, double t, double lambda, double alpha, double nu,
                     const SeriesControl& ctl = {});

/// Mean and variance; +inf when the subordinator has no finite moments.
MeanVariance spp_moments(double t, const SppParams& p);

std::uint64_t spp_sample(double t, const SppParams& p, RandomStream& rng);

/// Adaptive pmf with tail-mass estimate: geometric ratio for light tails,
/// branch-point asymptotics for the power-law families.
Pmf spp_pmf_adaptive(double t, const SppParams& p, const SeriesControl& ctl = {});

/// pgf of N^f(t) as a singular expansion in w = 1 - z (power-law families).
std::optional<SingularExpansion> spp_singular_expansion(double t, const SppParams& p,
                                                        double cap);

namespace detail {

/// sum_r (-x)^r / r! * binom(alpha r, k) in binary128 with diagnostics.
quad fractional_kernel(std::uint64_t k, double alpha, double x, const SeriesControl& ctl,
                       SeriesDiagnostic& diag);

/// Shared adaptive-truncation driver. `table(K)` returns the pmf for
/// k = 0..K-1.
template <class TableFn>
Pmf build_adaptive_pmf(TableFn&& table, const std::optional<SingularExpansion>& expansion,
                       const SeriesControl& ctl);

}  // namespace detail

}  // namespace geocount

#include "geocount/detail/adaptive_pmf.hpp"
