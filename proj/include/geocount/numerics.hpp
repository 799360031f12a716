#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/float128.hpp>

namespace geocount {

/// IEEE binary128. Alternating closed-form series lose roughly
/// log10(max term / result) digits, which exceeds double precision for
/// moderate parameters; those series are accumulated in this type.
using quad = boost::multiprecision::float128;

/// Truncation policy shared by every series evaluator.
struct SeriesControl {
  double abs_tol = 1e-12;
  std::size_t max_terms = 10'000;
  bool kahan = true;

  void validate() const;
};

/// Diagnostics returned next to every series value.
struct SeriesDiagnostic {
  std::size_t terms = 0;
  double last_term = 0.0;
  double max_term = 0.0;
  double tail_estimate = 0.0;
  bool converged = false;
};

struct SeriesValue {
  double value = 0.0;
  SeriesDiagnostic diagnostic;
};

/// Neumaier's variant of compensated summation.
template <class Real>
class CompensatedSum {
 public:
  explicit CompensatedSum(bool enabled = true) : enabled_(enabled) {}

  void add(Real x) {
    if (!enabled_) {
      sum_ += x;
      return;
    }
    Real t = sum_ + x;
    using std::abs;
    using boost::multiprecision::abs;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
  bool enabled_;
};

/// Stirling number of the second kind by the triangular recurrence.
/// Throws an overflow error when S(n,k) does not fit in 64 bits.
std::uint64_t stirling2(unsigned n, unsigned k);

/// w_n(y) = sum_k S(n,k) k! y^k.
double geometric_polynomial(unsigned n, double y);

/// Generalized binomial coefficient a(a-1)...(a-k+1)/k! by the product form.
double generalized_binomial(double a, unsigned k);
quad generalized_binomial_q(quad a, unsigned k);

/// Scaled geometric polynomials w_r(y)/r! for r = 0..count-1. They are the
/// Taylor coefficients of 1/(1 - y(e^s - 1)); the recurrence only adds
/// nonnegative terms for y >= 0.
std::vector<quad> scaled_geometric_polynomials(std::size_t count, quad y);

/// d/dy of w_r(y)/r!, same index range.
std::vector<quad> scaled_geometric_polynomial_derivatives(
    std::span<const quad> scaled, quad y);

/// Truncated Taylor polynomial around a fixed expansion point. Coefficient k
/// stores g^{(k)}(point)/k!.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::size_t order) : c_(order + 1, 0.0) {}
  explicit Jet(std::vector<double> coefficients);

  static Jet constant(std::size_t order, double value);

  std::size_t order() const noexcept { return c_.size() - 1; }
  double operator[](std::size_t k) const { return c_[k]; }
  double& operator[](std::size_t k) { return c_[k]; }
  const std::vector<double>& coefficients() const noexcept { return c_; }

  /// k-th derivative at the expansion point.
  double derivative(std::size_t k) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(double s);

 private:
  std::vector<double> c_{0.0};
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);

Jet jet_mul(const Jet& a, const Jet& b);
/// scale * x + shift.
Jet jet_scale_add(const Jet& x, double scale, double shift);
Jet jet_reciprocal(const Jet& x);
Jet jet_exp(const Jet& x);

}  // namespace geocount
