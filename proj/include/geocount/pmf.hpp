#pragma once

#include <cstddef>
#include <vector>

namespace geocount {

/// How the mass beyond the last stored index was estimated.
enum class TailMethod {
  none,                  // nothing beyond the support
  geometric_ratio,       // light tail, ratio of the last stored terms
  algebraic_asymptotic,  // heavy tail, branch-point expansion at z = 1
};

/// Truncated probability mass sequence with its truncation diagnostics.
struct Pmf {
  std::vector<double> values;  // P[N = k] for k = 0..size()-1
  double tail_mass = 0.0;      // estimate of P[N >= size()]
  double tail_error = 0.0;     // uncertainty of tail_mass
  TailMethod tail_method = TailMethod::none;
  bool converged = false;

  std::size_t truncation_index() const noexcept { return values.size(); }
  /// Compensated sum of the stored values.
  double stored_mass() const;
  double total_mass() const { return stored_mass() + tail_mass; }
};

}  // namespace geocount
