#include "geocount/jump_law.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "geocount/error.hpp"

namespace geocount {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr std::uint64_t kDirectSumLimit = 1'000'000;

void check_masses(const std::vector<double>& masses, const char* who) {
  if (masses.empty()) throw_out_of_range(std::string(who) + ": empty law");
  CompensatedSum<double> total;
  for (double v : masses) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw_out_of_range(std::string(who) + ": masses must be finite and nonnegative");
    }
    total.add(v);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg << who << ": total mass " << total.value() << " differs from 1 by more than 1e-9";
    throw_out_of_range(msg.str());
  }
}

}  // namespace

JumpLaw::JumpLaw(JumpKind kind, double origin, double step, std::vector<double> values)
    : kind_(kind), origin_(origin), step_(step), values_(std::move(values)) {
  const auto mass = masses();
  check_masses(mass, kind == JumpKind::discrete ? "discrete jump law" : "grid jump law");
  cumulative_.resize(mass.size());
  CompensatedSum<double> acc;
  CompensatedSum<double> s1;
  CompensatedSum<double> s2;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    acc.add(mass[i]);
    cumulative_[i] = acc.value();
    if (kind_ == JumpKind::discrete) {
      const double x = static_cast<double>(i);
      s1.add(mass[i] * x);
      s2.add(mass[i] * x * x);
    } else {
      const double a = origin_ + static_cast<double>(i) * step_;
      s1.add(mass[i] * (a + 0.5 * step_));
      s2.add(mass[i] * (a * a + a * step_ + step_ * step_ / 3.0));
    }
  }
  m1_ = s1.value();
  m2_ = s2.value();
}

JumpLaw JumpLaw::discrete(std::vector<double> pmf) {
  return JumpLaw(JumpKind::discrete, 0.0, 1.0, std::move(pmf));
}

JumpLaw JumpLaw::degenerate(std::size_t value) {
  std::vector<double> pmf(value + 1, 0.0);
  pmf[value] = 1.0;
  return discrete(std::move(pmf));
}

JumpLaw JumpLaw::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw_out_of_range("bernoulli: p must lie in [0, 1]");
  return discrete({1.0 - p, p});
}

JumpLaw JumpLaw::grid(double origin, double step, std::vector<double> density) {
  if (!std::isfinite(origin)) throw_out_of_range("grid jump law: origin must be finite");
  if (!(step > 0.0) || !std::isfinite(step)) throw_out_of_range("grid jump law: step must be > 0");
  return JumpLaw(JumpKind::grid, origin, step, std::move(density));
}

JumpLaw JumpLaw::exponential_grid(double rate, double step, std::size_t cells) {
  if (!(rate > 0.0)) throw_out_of_range("exponential_grid: rate must be > 0");
  if (!(step > 0.0)) throw_out_of_range("exponential_grid: step must be > 0");
  if (cells == 0) throw_out_of_range("exponential_grid: need at least one cell");
  std::vector<double> mass(cells);
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = rate * step * static_cast<double>(i);
    mass[i] = std::exp(-a) * -std::expm1(-rate * step);
    total.add(mass[i]);
  }
  const double z = total.value();
  for (auto& m : mass) m = m / z / step;
  return grid(0.0, step, std::move(mass));
}

double JumpLaw::support_min() const {
  std::size_t i = 0;
  while (i < values_.size() && values_[i] == 0.0) ++i;
  if (kind_ == JumpKind::discrete) return static_cast<double>(i);
  return origin_ + static_cast<double>(i) * step_;
}

std::vector<double> JumpLaw::masses() const {
  if (kind_ == JumpKind::discrete) return values_;
  std::vector<double> out(values_);
  for (auto& v : out) v *= step_;
  return out;
}

double JumpLaw::cdf(double y) const {
  if (kind_ == JumpKind::discrete) {
    if (y < 0.0) return 0.0;
    const double idx = std::floor(y);
    if (idx >= static_cast<double>(cumulative_.size() - 1)) return 1.0;
    return std::min(1.0, cumulative_[static_cast<std::size_t>(idx)]);
  }
  const double z = (y - origin_) / step_;
  CompensatedSum<double> s;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double w = std::clamp(z - static_cast<double>(j), 0.0, 1.0);
    if (w == 0.0) break;
    s.add(values_[j] * step_ * w);
  }
  return std::min(1.0, s.value());
}

double JumpLaw::sample(RandomStream& rng) const {
  const double u = rng.uniform_open() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  if (kind_ == JumpKind::discrete) return static_cast<double>(i);
  return origin_ + (static_cast<double>(i) + rng.uniform_open()) * step_;
}

double JumpLaw::sample_sum(std::uint64_t n, RandomStream& rng) const {
  const JumpLaw& law = *this;
  if (n <= kDirectSumLimit) {
    double s = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) s += law.sample(rng);
    return s;
  }
  const auto mass = law.masses();
  double left = 1.0;
  std::uint64_t remaining = n;
  double s = 0.0;
  for (std::size_t i = 0; i < mass.size() && remaining > 0; ++i) {
    std::uint64_t c = remaining;
    if (i + 1 < mass.size() && left > 0.0) {
      const double p = std::clamp(mass[i] / left, 0.0, 1.0);
      std::binomial_distribution<std::uint64_t> b(remaining, p);
      c = b(rng.engine());
    }
    left -= mass[i];
    remaining -= c;
    if (c == 0) continue;
    const double cd = static_cast<double>(c);
    if (law.kind() == JumpKind::discrete) {
      s += cd * static_cast<double>(i);
    } else {
      const double a = law.origin() + static_cast<double>(i) * law.step();
      // Irwin-Hall sum of c uniforms: exact for small c, normal otherwise.
      double u = 0.0;
      if (c <= 1000) {
        for (std::uint64_t j = 0; j < c; ++j) u += rng.uniform_open();
      } else {
        u = 0.5 * cd + std::sqrt(cd / 12.0) * rng.normal();
      }
      s += cd * a + law.step() * u;
    }
  }
  return s;
}

ConvolutionPowers::ConvolutionPowers(const JumpLaw& law, double y_max)
    : law_(&law), base_(law.masses()), current_{1.0} {
  truncate_ = law.nonnegative();
  if (truncate_) {
    const double reach = law.kind() == JumpKind::discrete
                             ? y_max
                             : (y_max - law.origin()) / law.step();
    limit_ = reach < 0.0 ? 0 : static_cast<std::size_t>(std::floor(reach)) + 1;
  } else {
    limit_ = 0;
  }
}

void ConvolutionPowers::advance() {
  std::size_t n = current_.size() + base_.size() - 1;
  if (truncate_) n = std::min(n, limit_ + 1);
  std::vector<double> next(n, 0.0);
  for (std::size_t i = 0; i < current_.size() && i < n; ++i) {
    const double a = current_[i];
    if (a == 0.0) continue;
    const std::size_t jmax = std::min(base_.size(), n - i);
    for (std::size_t j = 0; j < jmax; ++j) next[i + j] += a * base_[j];
  }
  current_ = std::move(next);
  ++m_;
}

double ConvolutionPowers::mass_at(std::size_t k) const {
  return k < current_.size() ? current_[k] : 0.0;
}

double ConvolutionPowers::cdf(double y) const {
  if (m_ == 0) return y >= 0.0 ? 1.0 : 0.0;
  CompensatedSum<double> s;
  if (law_->kind() == JumpKind::discrete) {
    if (y < 0.0) return 0.0;
    const double idx = std::floor(y);
    const std::size_t last =
        idx >= static_cast<double>(current_.size()) ? current_.size() : static_cast<std::size_t>(idx) + 1;
    for (std::size_t j = 0; j < last; ++j) s.add(current_[j]);
    return std::min(1.0, s.value());
  }
  // The m-fold sum of within-cell uniforms is replaced by a single uniform
  // on a cell centred at its mean; the error is O(step^2) for smooth laws.
  const double m = static_cast<double>(m_);
  const double z = (y - m * law_->origin()) / law_->step() - 0.5 * m;
  for (std::size_t j = 0; j < current_.size(); ++j) {
    const double w = std::clamp(z - static_cast<double>(j) + 0.5, 0.0, 1.0);
    if (w == 0.0) break;
    s.add(current_[j] * w);
  }
  return std::min(1.0, s.value());
}

CompoundCdf compound_cdf(const std::function<std::vector<double>(std::size_t)>& count_table,
                         const JumpLaw& law, double y, const SeriesControl& ctl) {
  ctl.validate();
  CompoundCdf out;
  ConvolutionPowers powers(law, y);
  const bool monotone = law.nonnegative();
  std::size_t K = std::min<std::size_t>(64, ctl.max_terms);
  std::vector<double> pmf = count_table(K);
  CompensatedSum<double> value(ctl.kahan);
  CompensatedSum<double> cumulative(ctl.kahan);
  for (std::size_t m = 0;; ++m) {
    if (m >= pmf.size()) {
      if (K >= ctl.max_terms) break;
      K = std::min(2 * K, ctl.max_terms);
      pmf = count_table(K);
    }
    if (m > 0) powers.advance();
    const double fm = powers.cdf(y);
    value.add(pmf[m] * fm);
    cumulative.add(pmf[m]);
    out.terms = m + 1;
    const double remaining = std::max(0.0, 1.0 - cumulative.value());
    out.truncation_bound = monotone ? remaining * fm : remaining;
    if (out.truncation_bound < ctl.abs_tol) {
      out.converged = true;
      break;
    }
  }
  out.value = std::clamp(value.value(), 0.0, 1.0);
  if (!out.converged) {
    out.warnings.push_back("count series truncated at max_terms; bound " +
                           std::to_string(out.truncation_bound));
  }
  return out;
}

}  // namespace geocount
