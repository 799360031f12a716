#include "geocount/asymptotic_tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geocount/error.hpp"

namespace geocount {

namespace {
constexpr double kExponentMergeTol = 1e-12;
}

SingularExpansion::SingularExpansion(double cap, std::vector<Term> terms)
    : cap_(cap), terms_(std::move(terms)) {
  normalize();
}

SingularExpansion SingularExpansion::constant(double cap, double value) {
  return SingularExpansion(cap, {{0.0, value}});
}

void SingularExpansion::normalize() {
  std::erase_if(terms_, [&](const Term& t) {
    return t.exponent > cap_ + kExponentMergeTol || t.coef == 0.0;
  });
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  std::vector<Term> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() &&
        std::abs(merged.back().exponent - t.exponent) <= kExponentMergeTol) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

SingularExpansion SingularExpansion::operator+(const SingularExpansion& other) const {
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return SingularExpansion(std::min(cap_, other.cap_), std::move(all));
}

SingularExpansion SingularExpansion::operator*(const SingularExpansion& other) const {
  const double cap = std::min(cap_, other.cap_);
  std::vector<Term> out;
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      const double e = a.exponent + b.exponent;
      if (e > cap + kExponentMergeTol) break;
      out.push_back({e, a.coef * b.coef});
    }
  }
  return SingularExpansion(cap, std::move(out));
}

SingularExpansion SingularExpansion::scaled(double s) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coef *= s;
  return SingularExpansion(cap_, std::move(out));
}

double SingularExpansion::min_exponent() const {
  return terms_.empty() ? std::numeric_limits<double>::infinity()
                        : terms_.front().exponent;
}

SingularExpansion SingularExpansion::exp() const {
  double c0 = 0.0;
  std::vector<Term> rest;
  for (const auto& t : terms_) {
    if (t.exponent <= kExponentMergeTol) {
      c0 += t.coef;
    } else {
      rest.push_back(t);
    }
  }
  SingularExpansion x(cap_, std::move(rest));
  SingularExpansion sum = constant(cap_, 1.0);
  SingularExpansion power = constant(cap_, 1.0);
  const double step = x.min_exponent();
  if (std::isfinite(step)) {
    for (std::size_t n = 1; n * step <= cap_ + kExponentMergeTol; ++n) {
      power = (power * x).scaled(1.0 / static_cast<double>(n));
      sum = sum + power;
    }
  }
  return sum.scaled(std::exp(c0));
}

SingularExpansion SingularExpansion::reciprocal_one_plus(double c) const {
  const double step = min_exponent();
  if (!(step > kExponentMergeTol)) {
    throw_invalid("reciprocal_one_plus requires strictly positive exponents");
  }
  SingularExpansion x = scaled(-c);
  SingularExpansion sum = constant(cap_, 1.0);
  SingularExpansion power = constant(cap_, 1.0);
  for (std::size_t n = 1; n * step <= cap_ + kExponentMergeTol; ++n) {
    power = power * x;
    sum = sum + power;
  }
  return sum;
}

SingularExpansion::Tail SingularExpansion::tail_mass(std::size_t n) const {
  // [z^n] w^{b-1} = prod_{i=1}^{n} (i - b) / i, zero when b is a positive
  // integer no larger than n (polynomial pieces carry no tail).
  double value = 0.0;
  double last = 0.0;
  for (const auto& t : terms_) {
    if (t.exponent <= kExponentMergeTol) continue;
    double c = 1.0;
    for (std::size_t i = 1; i <= n && c != 0.0; ++i) {
      c *= (static_cast<double>(i) - t.exponent) / static_cast<double>(i);
    }
    const double contribution = -t.coef * c;
    value += contribution;
    last = contribution;
  }
  return {value, std::abs(last)};
}

}  // namespace geocount
