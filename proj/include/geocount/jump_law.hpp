#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geocount/numerics.hpp"
#include "geocount/random.hpp"

namespace geocount {

enum class JumpKind { discrete, grid };

/// Jump (or log-factor) distribution. Discrete laws live on 0, 1, 2, ...;
/// grid laws carry a density that is constant on each cell
/// [origin + i step, origin + (i+1) step).
class JumpLaw {
 public:
  /// Throws parameter_out_of_range unless pmf is nonnegative and sums to 1
  /// within 1e-9.
  static JumpLaw discrete(std::vector<double> pmf);
  /// Point mass at a nonnegative integer.
  static JumpLaw degenerate(std::size_t value);
  static JumpLaw bernoulli(double p);
  static JumpLaw grid(double origin, double step, std::vector<double> density);
  /// Exponential density with the given rate discretized on `cells` cells of
  /// width `step`, renormalized to unit mass.
  static JumpLaw exponential_grid(double rate, double step, std::size_t cells);

  JumpKind kind() const noexcept { return kind_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double origin() const noexcept { return origin_; }
  double step() const noexcept { return step_; }

  double moment1() const noexcept { return m1_; }
  double moment2() const noexcept { return m2_; }
  double variance() const noexcept { return m2_ - m1_ * m1_; }
  /// Smallest point of the support.
  double support_min() const;
  bool nonnegative() const { return support_min() >= 0.0; }

  /// Cell masses (grid) or point masses (discrete).
  std::vector<double> masses() const;

  double cdf(double y) const;
  double sample(RandomStream& rng) const;
  /// Sum of n iid draws; large n goes through multinomial cell counts.
  double sample_sum(std::uint64_t n, RandomStream& rng) const;

 private:
  JumpLaw(JumpKind kind, double origin, double step, std::vector<double> values);

  JumpKind kind_;
  double origin_;
  double step_;
  std::vector<double> values_;
  std::vector<double> cumulative_;  // cumulative masses for sampling
  double m1_ = 0.0;
  double m2_ = 0.0;
};

/// Successive convolution powers of a lattice law. The law of the m-th power
/// is kept on lattice indices 0..limit (lower indices are exact under
/// truncation because indices only add).
class ConvolutionPowers {
 public:
  /// `y_max` is the largest argument the cdf will be evaluated at; for laws
  /// with nonnegative support the lattice is truncated accordingly.
  ConvolutionPowers(const JumpLaw& law, double y_max);

  std::size_t power() const noexcept { return m_; }
  const std::vector<double>& masses() const noexcept { return current_; }

  /// P[X_1 + ... + X_m <= y] for the current m.
  double cdf(double y) const;
  /// Mass of the current power at lattice index k (discrete laws).
  double mass_at(std::size_t k) const;

  void advance();

 private:
  const JumpLaw* law_;
  std::vector<double> base_;
  std::vector<double> current_;
  std::size_t m_ = 0;
  std::size_t limit_;
  bool truncate_;
};

/// Outcome of a compound sum  sum_m P[N = m] F^{*m}(y).
struct CompoundCdf {
  double value = 0.0;
  double truncation_bound = 0.0;  // bound on the neglected terms
  std::size_t terms = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Evaluates the compound cdf. `count_table(K)` returns P[N = m] for
/// m = 0..K-1. For nonnegative laws P[S_m <= y] is nonincreasing in m, which
/// bounds the neglected terms by P[N >= M] P[S_M <= y].
CompoundCdf compound_cdf(const std::function<std::vector<double>(std::size_t)>& count_table,
                         const JumpLaw& law, double y, const SeriesControl& ctl);

}  // namespace geocount
