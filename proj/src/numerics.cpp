#include "geocount/numerics.hpp"

#include <limits>
#include <sstream>
#include <string>

#include "geocount/error.hpp"

namespace geocount {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::unknown_family: return "unknown_family";
    case ErrorCode::parameter_out_of_range: return "parameter_out_of_range";
    case ErrorCode::region_violation: return "region_violation";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::sampler_degeneracy: return "sampler_degeneracy";
    case ErrorCode::io: return "io";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::overflow: return "overflow";
  }
  return "unknown";
}

void throw_out_of_range(const std::string& what) {
  throw Error(ErrorCode::parameter_out_of_range, what);
}

void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, what);
}

void SeriesControl::validate() const {
  if (!(abs_tol > 0.0)) throw_out_of_range("abs_tol must be > 0");
  if (max_terms < 1) throw_out_of_range("max_terms must be >= 1");
}

std::uint64_t stirling2(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (n > 170) throw_out_of_range("stirling2: n must be <= 170");
  // Row-by-row; row[j] holds S(i, j).
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (unsigned i = 1; i <= n; ++i) {
    unsigned top = std::min(i, k);
    for (unsigned j = top; j >= 1; --j) {
      std::uint64_t scaled = 0;
      std::uint64_t next = 0;
      if (__builtin_mul_overflow(static_cast<std::uint64_t>(j), row[j], &scaled) ||
          __builtin_add_overflow(scaled, row[j - 1], &next)) {
        std::ostringstream msg;
        msg << "stirling2(" << n << ", " << k << ") exceeds 64-bit range";
        throw Error(ErrorCode::overflow, msg.str());
      }
      row[j] = next;
    }
    row[0] = 0;
  }
  return row[k];
}

double geometric_polynomial(unsigned n, double y) {
  if (n > 170) throw_out_of_range("geometric_polynomial: n must be <= 170");
  if (!std::isfinite(y)) throw_invalid("geometric_polynomial: y must be finite");
  // b[k] = S(i,k) k!, with b_{i,k} = k (b_{i-1,k} + b_{i-1,k-1}).
  std::vector<double> b(n + 1, 0.0);
  b[0] = 1.0;
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned k = i; k >= 1; --k) b[k] = k * (b[k] + b[k - 1]);
    b[0] = 0.0;
  }
  double acc = 0.0;
  for (unsigned k = n + 1; k-- > 0;) acc = acc * y + b[k];
  if (!std::isfinite(acc)) {
    std::ostringstream msg;
    msg << "geometric_polynomial overflow at n=" << n << ", y=" << y;
    throw Error(ErrorCode::overflow, msg.str());
  }
  return acc;
}

double generalized_binomial(double a, unsigned k) {
  if (!std::isfinite(a)) throw_invalid("generalized_binomial: a must be finite");
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) {
    r *= (a - i) / static_cast<double>(i + 1);
    if (r == 0.0) break;
  }
  return r;
}

quad generalized_binomial_q(quad a, unsigned k) {
  quad r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= (a - i) / quad(i + 1);
    if (r == 0) break;
  }
  return r;
}

std::vector<quad> scaled_geometric_polynomials(std::size_t count, quad y) {
  std::vector<quad> a(count);
  if (count == 0) return a;
  std::vector<quad> inv_fact(count);
  inv_fact[0] = 1;
  for (std::size_t j = 1; j < count; ++j) inv_fact[j] = inv_fact[j - 1] / quad(j);
  a[0] = 1;
  for (std::size_t r = 1; r < count; ++r) {
    quad s = 0;
    for (std::size_t j = 1; j <= r; ++j) s += a[r - j] * inv_fact[j];
    a[r] = y * s;
  }
  return a;
}

std::vector<quad> scaled_geometric_polynomial_derivatives(
    std::span<const quad> scaled, quad y) {
  const std::size_t count = scaled.size();
  std::vector<quad> d(count);
  if (count == 0) return d;
  std::vector<quad> inv_fact(count);
  inv_fact[0] = 1;
  for (std::size_t j = 1; j < count; ++j) inv_fact[j] = inv_fact[j - 1] / quad(j);
  d[0] = 0;
  for (std::size_t r = 1; r < count; ++r) {
    quad s = 0;
    quad sd = 0;
    for (std::size_t j = 1; j <= r; ++j) {
      s += scaled[r - j] * inv_fact[j];
      sd += d[r - j] * inv_fact[j];
    }
    d[r] = s + y * sd;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Jet

Jet::Jet(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) c_.push_back(0.0);
}

Jet Jet::constant(std::size_t order, double value) {
  Jet j(order);
  j.c_[0] = value;
  return j;
}

double Jet::derivative(std::size_t k) const {
  double f = 1.0;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return c_[k] * f;
}

namespace {
void require_same_order(const Jet& a, const Jet& b) {
  if (a.order() != b.order()) throw_invalid("jet order mismatch");
}
}  // namespace

Jet& Jet::operator+=(const Jet& other) {
  require_same_order(*this, other);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += other.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_same_order(*this, other);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= other.c_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }

Jet jet_mul(const Jet& a, const Jet& b) {
  require_same_order(a, b);
  const std::size_t n = a.order();
  Jet out(n);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i) s += a[i] * b[k - i];
    out[k] = s;
  }
  return out;
}

Jet jet_scale_add(const Jet& x, double scale, double shift) {
  Jet out = x * scale;
  out[0] += shift;
  return out;
}

Jet jet_reciprocal(const Jet& x) {
  if (x[0] == 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "jet_reciprocal: constant term is zero");
  }
  const std::size_t n = x.order();
  Jet r(n);
  r[0] = 1.0 / x[0];
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += x[j] * r[k - j];
    r[k] = -s / x[0];
  }
  return r;
}

Jet jet_exp(const Jet& x) {
  // E' = x' E  =>  k e_k = sum_{j=1}^{k} j x_j e_{k-j}.
  const std::size_t n = x.order();
  Jet e(n);
  e[0] = std::exp(x[0]);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x[j] * e[k - j];
    e[k] = s / static_cast<double>(k);
  }
  return e;
}

}  // namespace geocount
