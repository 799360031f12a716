#pragma once

#include <algorithm>
#include <cmath>

namespace geocount::detail {

template <class TableFn>
Pmf build_adaptive_pmf(TableFn&& table, const std::optional<SingularExpansion>& expansion,
                       const SeriesControl& ctl) {
  ctl.validate();
  std::size_t K = std::min<std::size_t>(64, ctl.max_terms);
  Pmf out;
  for (;;) {
    out.values = table(K);
    if (expansion) {
      const auto tail = expansion->tail_mass(K - 1);
      // The stored block [K/2, K) must account for tail(K/2 - 1) - tail(K - 1);
      // the mismatch measures how far the expansion is from its asymptotic regime.
      const std::size_t half = K / 2;
      double block = 0.0;
      for (std::size_t k = half; k < K; ++k) block += out.values[k];
      const double drift = std::abs(expansion->tail_mass(half - 1).value - tail.value - block);
      out.tail_mass = tail.value;
      out.tail_error = std::max(tail.error_estimate, drift);
      out.tail_method = TailMethod::algebraic_asymptotic;
      out.converged = out.tail_error < ctl.abs_tol;
    } else {
      const double last = out.values[K - 1];
      const double prev = K >= 2 ? out.values[K - 2] : 1.0;
      const double q = prev > 0.0 ? last / prev : 0.0;
      out.tail_method = TailMethod::geometric_ratio;
      if (q < 1.0 && last >= 0.0) {
        out.tail_mass = last * q / (1.0 - q);
        out.tail_error = out.tail_mass;
        out.converged = out.tail_mass < ctl.abs_tol;
      } else {
        out.tail_mass = std::max(0.0, 1.0 - out.stored_mass());
        out.tail_error = out.tail_mass;
        out.converged = false;
      }
    }
    if (out.converged || K >= ctl.max_terms) break;
    K = std::min(2 * K, ctl.max_terms);
  }
  return out;
}

}  // namespace geocount::detail
