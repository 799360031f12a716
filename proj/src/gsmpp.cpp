#include "geocount/gsmpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geocount/error.hpp"

namespace geocount {

namespace {

constexpr std::uint64_t kDirectProductLimit = 1'000'000;
constexpr double kLogMergeTol = 1e-12;
// The tempered double series costs O(k^3) per count; beyond this many
// counts the tail of the table comes from the jet.
constexpr std::size_t kTemperedSeriesCounts = 64;

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw_out_of_range(std::string(who) + ": t must be finite and >= 0");
  }
}

struct LogAtom {
  double log_value;
  double prob;
};

// Law of log(X_1 ... X_m) for atomic factors, advanced one factor at a time.
class AtomicProducts {
 public:
  explicit AtomicProducts(const FactorLaw& law) : state_{{0.0, 1.0}} {
    for (std::size_t i = 0; i < law.atom_values().size(); ++i) {
      if (law.atom_probs()[i] > 0.0 && law.atom_values()[i] > 0.0) {
        base_.push_back({std::log(law.atom_values()[i]), law.atom_probs()[i]});
      }
    }
  }

  void advance() {
    std::vector<LogAtom> next;
    next.reserve(state_.size() * base_.size());
    for (const auto& s : state_) {
      for (const auto& b : base_) next.push_back({s.log_value + b.log_value, s.prob * b.prob});
    }
    std::sort(next.begin(), next.end(),
              [](const LogAtom& a, const LogAtom& b) { return a.log_value < b.log_value; });
    state_.clear();
    for (const auto& a : next) {
      if (!state_.empty() &&
          a.log_value - state_.back().log_value <=
              kLogMergeTol * std::max(1.0, std::abs(a.log_value))) {
        state_.back().prob += a.prob;
      } else {
        state_.push_back(a);
      }
    }
  }

  // Mass of the strictly positive products at or below e^x; the products
  // that hit a zero factor are not included.
  double cdf_log(double x) const {
    CompensatedSum<double> s;
    const double limit = x + kLogMergeTol * std::max(1.0, std::abs(x));
    for (const auto& a : state_) {
      if (a.log_value > limit) break;
      s.add(a.prob);
    }
    return std::min(1.0, s.value());
  }

  bool nonnegative_logs() const {
    return std::all_of(base_.begin(), base_.end(),
                       [](const LogAtom& a) { return a.log_value >= 0.0; });
  }

 private:
  std::vector<LogAtom> base_;
  std::vector<LogAtom> state_;
};

CompoundCdf product_cdf(const std::function<std::vector<double>(std::size_t)>& count_table,
                        const FactorLaw& factors, double y, const SeriesControl& ctl) {
  ctl.validate();
  if (y < 0.0 || (y == 0.0 && !factors.atomic())) {
    CompoundCdf out;
    out.converged = true;
    return out;
  }
  if (!factors.atomic()) return compound_cdf(count_table, factors.log_law(), std::log(y), ctl);

  CompoundCdf out;
  AtomicProducts products(factors);
  double p_zero = 0.0;
  for (std::size_t i = 0; i < factors.atom_values().size(); ++i) {
    if (factors.atom_values()[i] == 0.0) p_zero += factors.atom_probs()[i];
  }
  const bool monotone = p_zero == 0.0 && products.nonnegative_logs();
  const double x = y > 0.0 ? std::log(y) : 0.0;
  double no_zero = 1.0;  // (1 - p_zero)^m
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
    if (m > 0) {
      products.advance();
      no_zero *= 1.0 - p_zero;
    }
    const double fm = std::min(1.0, (1.0 - no_zero) + (y > 0.0 ? products.cdf_log(x) : 0.0));
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

}  // namespace

FactorLaw FactorLaw::atoms(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw_out_of_range("factor atoms: values and probabilities must be nonempty and equal length");
  }
  FactorLaw law;
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw_out_of_range("factor atoms must be finite and nonnegative");
    }
    if (!(probs[i] >= 0.0)) throw_out_of_range("factor probabilities must be >= 0");
    total.add(probs[i]);
    law.cumulative_.push_back(total.value());
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw_out_of_range("factor probabilities must sum to 1 within 1e-9");
  }
  law.values_ = std::move(values);
  law.probs_ = std::move(probs);
  return law;
}

FactorLaw FactorLaw::constant(double value) { return atoms({value}, {1.0}); }

FactorLaw FactorLaw::log_grid(JumpLaw log_law) {
  if (log_law.kind() != JumpKind::grid) throw_invalid("log_grid expects a grid law of log X");
  FactorLaw law;
  law.atomic_ = false;
  law.log_law_.push_back(std::move(log_law));
  return law;
}

const JumpLaw& FactorLaw::log_law() const {
  if (atomic_) throw_invalid("atomic factor law has no log grid");
  return log_law_.front();
}

double FactorLaw::mellin(double beta) const {
  if (!std::isfinite(beta)) throw_out_of_range("mellin: beta must be finite");
  const double c = beta - 1.0;
  CompensatedSum<double> s;
  if (atomic_) {
    for (std::size_t i = 0; i < values_.size(); ++i) s.add(probs_[i] * std::pow(values_[i], c));
    return s.value();
  }
  const JumpLaw& g = log_law_.front();
  const auto mass = g.masses();
  const double h = g.step();
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] == 0.0) continue;
    const double a = g.origin() + static_cast<double>(i) * h;
    // Cell average of e^{c x} over [a, a + h).
    const double avg = c == 0.0 ? 1.0 : std::exp(c * a) * std::expm1(c * h) / (c * h);
    s.add(mass[i] * avg);
  }
  return s.value();
}

double FactorLaw::mean_log() const {
  if (!atomic_) return log_law_.front().moment1();
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < values_.size(); ++i) s.add(probs_[i] * std::log(values_[i]));
  return s.value();
}

double FactorLaw::sample(RandomStream& rng) const {
  if (!atomic_) return std::exp(log_law_.front().sample(rng));
  const double u = rng.uniform_open() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return values_[std::min<std::size_t>(it - cumulative_.begin(), values_.size() - 1)];
}

double FactorLaw::sample_log_product(std::uint64_t n, RandomStream& rng) const {
  if (!atomic_) return log_law_.front().sample_sum(n, rng);
  double s = 0.0;
  if (n <= kDirectProductLimit) {
    for (std::uint64_t i = 0; i < n; ++i) s += std::log(sample(rng));
    return s;
  }
  double left = 1.0;
  std::uint64_t remaining = n;
  for (std::size_t i = 0; i < values_.size() && remaining > 0; ++i) {
    std::uint64_t c = remaining;
    if (i + 1 < values_.size() && left > 0.0) {
      std::binomial_distribution<std::uint64_t> b(remaining,
                                                  std::clamp(probs_[i] / left, 0.0, 1.0));
      c = b(rng.engine());
    }
    left -= probs_[i];
    remaining -= c;
    if (c > 0) s += static_cast<double>(c) * std::log(values_[i]);
  }
  return s;
}

void GsmppParams::validate() const { gspp.validate(); }

CompoundCdf gsmpp_cdf(double y, double t, const GsmppParams& p, const SeriesControl& ctl) {
  p.validate();
  check_time(t, "gsmpp_cdf");
  auto table = [&](std::size_t K) { return gspp_pmf_generic_table(K - 1, t, p.gspp); };
  return product_cdf(table, p.factors, y, ctl);
}

double gsmpp_mellin(double beta, double t, const GsmppParams& p, const SeriesControl& ctl,
                    MellinRoute route) {
  p.validate();
  ctl.validate();
  check_time(t, "gsmpp_mellin");
  const double m = p.factors.mellin(beta);
  if (!(m <= 1.0)) {
    std::ostringstream msg;
    msg << "gsmpp_mellin: E[X^{beta-1}] = " << m
        << " exceeds 1; the series over the count diverges for this beta";
    throw ConvergenceError(msg.str(), std::numeric_limits<double>::infinity(), m);
  }
  if (route == MellinRoute::composition) return gspp_pgf(m, t, p.gspp);
  const Pmf pmf = gspp_pmf_adaptive(t, p.gspp, ctl);
  CompensatedSum<double> s(ctl.kahan);
  double power = 1.0;
  for (double v : pmf.values) {
    s.add(v * power);
    power *= m;
  }
  // Remaining terms are bounded by tail_mass * m^K.
  const double bound = pmf.tail_mass * power;
  if (bound > ctl.abs_tol) {
    throw ConvergenceError("gsmpp_mellin: count tail too heavy for the series route", s.value(),
                           bound);
  }
  return s.value();
}

double gsmpp_mean(double t, const GsmppParams& p, const SeriesControl& ctl) {
  return gsmpp_mellin(2.0, t, p, ctl);
}

double gsmpp_atom_at_one(double t, double lambda, double alpha, double nu, double mu) {
  check_time(t, "gsmpp_atom_at_one");
  if (!(lambda > 0.0 && mu > 0.0 && nu >= 0.0)) {
    throw_out_of_range("lambda and mu must be > 0, nu >= 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw_out_of_range("alpha must lie in (0, 1)");
  const double f = std::pow(lambda + nu, alpha) - std::pow(nu, alpha);
  return 1.0 / (1.0 - mu * t * std::expm1(-f));
}

CompoundCdf gsmpp_tempered_cdf(double y, double t, double lambda, double alpha, double nu,
                               double mu, const FactorLaw& factors, const SeriesControl& ctl) {
  check_time(t, "gsmpp_tempered_cdf");
  const GsppParams gp{{lambda, SubordinatorSpec::tempered_stable(alpha, nu)}, {mu}};
  gp.validate();
  std::vector<double> cache;
  std::string notice;
  bool series = gspp_tsfpp_in_region(t, lambda, alpha, nu, mu);
  if (!series) notice = "tempered series region violated; used the generic jet";
  auto table = [&](std::size_t K) {
    std::vector<double> jet;
    if (!series || K > kTemperedSeriesCounts) jet = gspp_pmf_generic_table(K - 1, t, gp);
    if (series) {
      try {
        const std::size_t head = std::min(K, kTemperedSeriesCounts);
        for (std::size_t m = cache.size(); m < head; ++m) {
          cache.push_back(gspp_pmf_tsfpp(m, t, lambda, alpha, nu, mu, ctl));
        }
        if (jet.empty()) return std::vector<double>(cache.begin(), cache.begin() + static_cast<long>(K));
        std::copy(cache.begin(), cache.end(), jet.begin());
      } catch (const Error& e) {
        series = false;
        notice = std::string("tempered series failed (") + e.what() + "); used the generic jet";
        if (jet.empty()) jet = gspp_pmf_generic_table(K - 1, t, gp);
      }
    }
    return jet;
  };
  CompoundCdf out = product_cdf(table, factors, y, ctl);
  if (!notice.empty()) out.warnings.push_back(notice);
  return out;
}

double gsmpp_sample(double t, const GsmppParams& p, RandomStream& rng) {
  p.validate();
  check_time(t, "gsmpp_sample");
  if (t == 0.0) return 1.0;
  const std::uint64_t n = gspp_sample(t, p.gspp, rng);
  return std::exp(p.factors.sample_log_product(n, rng));
}

}  // namespace geocount
