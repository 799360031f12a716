#pragma once

#include <cstddef>
#include <vector>

namespace geocount {

/// A finite sum  sum_i coef_i * w^{exponent_i}  in the variable w = 1 - z,
/// truncated at exponents above `cap`. Used for probability generating
/// functions whose only dominant singularity is an algebraic branch point at
/// z = 1 (stable-type subordinators): the coefficient asymptotics of each
/// power are known exactly, which gives the tail mass of heavy-tailed laws
/// where direct summation of the pmf is hopeless.
class SingularExpansion {
 public:
  struct Term {
    double exponent;
    double coef;
  };

  explicit SingularExpansion(double cap) : cap_(cap) {}
  SingularExpansion(double cap, std::vector<Term> terms);

  static SingularExpansion constant(double cap, double value);

  double cap() const noexcept { return cap_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  SingularExpansion operator+(const SingularExpansion& other) const;
  SingularExpansion operator*(const SingularExpansion& other) const;
  SingularExpansion scaled(double s) const;
  /// Smallest exponent carried by a nonzero term, or +inf.
  double min_exponent() const;

  /// exp(E), requires every exponent > 0 or a constant term only.
  SingularExpansion exp() const;
  /// 1 / (1 + c*E), requires every exponent > 0.
  SingularExpansion reciprocal_one_plus(double c) const;

  struct Tail {
    double value;
    double error_estimate;
  };
  /// P(N > n) when this expansion is the pgf of N written in w = 1 - z.
  Tail tail_mass(std::size_t n) const;

 private:
  void normalize();

  double cap_;
  std::vector<Term> terms_;
};

}  // namespace geocount
