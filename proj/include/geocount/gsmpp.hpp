#pragma once

#include <cstdint>
#include <vector>

#include "geocount/gscpp.hpp"
#include "geocount/gspp.hpp"
#include "geocount/jump_law.hpp"

namespace geocount {

/// Law of a nonnegative factor: finitely many atoms (an atom at 0 is
/// allowed and makes the product vanish), or a gridded density of log X.
class FactorLaw {
 public:
  static FactorLaw atoms(std::vector<double> values, std::vector<double> probs);
  static FactorLaw constant(double value);
  static FactorLaw log_grid(JumpLaw log_law);

  bool atomic() const noexcept { return atomic_; }
  const std::vector<double>& atom_values() const noexcept { return values_; }
  const std::vector<double>& atom_probs() const noexcept { return probs_; }
  /// Law of log X (grid laws only).
  const JumpLaw& log_law() const;

  /// E[X^{beta-1}]; +inf when it diverges.
  double mellin(double beta) const;
  double mean() const { return mellin(2.0); }
  double mean_log() const;

  double sample(RandomStream& rng) const;
  /// log of a product of n iid factors.
  double sample_log_product(std::uint64_t n, RandomStream& rng) const;

 private:
  FactorLaw() = default;

  bool atomic_ = true;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<JumpLaw> log_law_;  // zero or one element
};

struct GsmppParams {
  GsppParams gspp;
  FactorLaw factors;

  void validate() const;
};

/// Q(y) = sum_m P[N = m] P[X_1 ... X_m <= y], the m = 0 term being the
/// atom at 1.
CompoundCdf gsmpp_cdf(double y, double t, const GsmppParams& p, const SeriesControl& ctl = {});

enum class MellinRoute {
  composition,  // count pgf evaluated at E[X^{beta-1}]
  series,       // sum_k P[N = k] E[X^{beta-1}]^k
};

/// E[Y^{beta-1}]. Throws ConvergenceError when E[X^{beta-1}] > 1.
double gsmpp_mellin(double beta, double t, const GsmppParams& p, const SeriesControl& ctl = {},
                    MellinRoute route = MellinRoute::composition);
double gsmpp_mean(double t, const GsmppParams& p, const SeriesControl& ctl = {});

/// P[Y = 1] from the empty product, tempered stable subordinator.
double gsmpp_atom_at_one(double t, double lambda, double alpha, double nu, double mu);

/// cdf with the count law from the tempered double series (first 64 counts,
/// the jet beyond); outside its region the generic jet is used and a notice
/// is added to the warnings.
CompoundCdf gsmpp_tempered_cdf(double y, double t, double lambda, double alpha, double nu,
                               double mu, const FactorLaw& factors, const SeriesControl& ctl = {});

double gsmpp_sample(double t, const GsmppParams& p, RandomStream& rng);

}  // namespace geocount
