#pragma once

#include <cstdint>

#include "geocount/gspp.hpp"
#include "geocount/jump_law.hpp"

namespace geocount {

/// Compound sum of iid jumps over the GSPP count.
struct GscppParams {
  GsppParams gspp;
  JumpLaw jumps;

  void validate() const;
};

/// Moments from the compound identity; +inf entries for the stable family.
MomentTriple gscpp_moments(double t, const GscppParams& p);

enum class PmfRoute {
  derivative,    // u-derivatives of the count pgf (jet coefficients)
  conditioning,  // count pmf from the sum over the geometric clock
};

/// P[Y(t) = k] for discrete jumps.
double gscpp_pmf_discrete(std::uint64_t k, double t, const GscppParams& p,
                          const SeriesControl& ctl = {}, PmfRoute route = PmfRoute::derivative);

/// Mass at zero coming from the empty sum, 1/(1 + mu t (1 - e^{-f(lambda)})).
double gscpp_empty_sum_atom(double t, const GscppParams& p);

struct CdfOptions {
  /// Grid laws with a coarser step get a resolution warning.
  double max_grid_step = 0.1;
};

CompoundCdf gscpp_cdf(double y, double t, const GscppParams& p, const SeriesControl& ctl = {},
                      const CdfOptions& options = {});

double gscpp_sample(double t, const GscppParams& p, RandomStream& rng);

}  // namespace geocount
