#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geocount/asymptotic_tail.hpp"
#include "geocount/numerics.hpp"
#include "geocount/random.hpp"

namespace geocount {

// Bernstein-function families. Tempering is always called nu.

struct StableFamily {
  double alpha;
};

struct TemperedStableFamily {
  double alpha;
  double nu;
};

struct GammaFamily {
  double shape;  // p
  double rate;   // beta
};

struct InverseGaussianFamily {
  double delta;
  double gamma;
};

struct MixedStableFamily {
  std::vector<double> weights;
  std::vector<double> alphas;
};

struct MixedTemperedFamily {
  std::vector<double> weights;
  std::vector<double> alphas;
  std::vector<double> nus;
};

using SubordinatorFamily =
    std::variant<StableFamily, TemperedStableFamily, GammaFamily,
                 InverseGaussianFamily, MixedStableFamily, MixedTemperedFamily>;

/// A validated subordinator family with its parameters.
class SubordinatorSpec {
 public:
  /// Throws parameter_out_of_range on invalid parameters.
  explicit SubordinatorSpec(SubordinatorFamily family);

  static SubordinatorSpec stable(double alpha);
  static SubordinatorSpec tempered_stable(double alpha, double nu);
  static SubordinatorSpec gamma(double shape, double rate);
  static SubordinatorSpec inverse_gaussian(double delta, double gamma);
  static SubordinatorSpec mixed_stable(std::vector<double> weights,
                                       std::vector<double> alphas);
  static SubordinatorSpec mixed_tempered(std::vector<double> weights,
                                         std::vector<double> alphas,
                                         std::vector<double> nus);

  const SubordinatorFamily& family() const noexcept { return family_; }
  std::string_view family_name() const noexcept;

  /// True for the pure power families (stable, mixed stable), whose
  /// subordinated counts are heavy tailed with infinite mean.
  bool is_power_law() const noexcept;

  template <class T>
  const T* get() const noexcept {
    return std::get_if<T>(&family_);
  }

 private:
  SubordinatorFamily family_;
};

/// Extended-real unit-time moments; +inf marks non-finite moments.
struct UnitMoments {
  double mean;
  double second_moment;
  double variance;

  bool finite() const noexcept;
};

double laplace_exponent(const SubordinatorSpec& spec, double s);

/// Jet of u -> f(lambda u) around u = 1, order `order`.
Jet taylor_coeffs_at(const SubordinatorSpec& spec, double lambda, std::size_t order);

UnitMoments unit_moments(const SubordinatorSpec& spec);

/// Draw of D^f(t). Throws sampler_degeneracy if a rejection loop exceeds its
/// guard count.
double subordinator_sample(const SubordinatorSpec& spec, double t, RandomStream& rng);

/// Power terms  sum_i c_i lambda^{alpha_i} w^{alpha_i}  of f(lambda w) for the
/// power-law families; nullopt otherwise.
std::optional<SingularExpansion> power_law_exponent_expansion(
    const SubordinatorSpec& spec, double lambda, double cap);

}  // namespace geocount
