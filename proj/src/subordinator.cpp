#include "geocount/subordinator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "geocount/error.hpp"

namespace geocount {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw_out_of_range("alpha must lie in (0, 1)");
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw_out_of_range(std::string(name) + " must be positive and finite");
  }
}

void check_weights(const std::vector<double>& w, std::size_t n) {
  if (w.empty() || w.size() != n) {
    throw_out_of_range("mixture weights and component parameters must have equal, nonzero length");
  }
  double total = 0.0;
  for (double c : w) {
    if (!(c >= 0.0)) throw_out_of_range("mixture weights must be >= 0");
    total += c;
  }
  if (std::abs(total - 1.0) > 1e-9) throw_out_of_range("mixture weights must sum to 1");
}

struct Validator {
  void operator()(const StableFamily& f) const { check_alpha(f.alpha); }
  void operator()(const TemperedStableFamily& f) const {
    check_alpha(f.alpha);
    check_positive(f.nu, "nu");
  }
  void operator()(const GammaFamily& f) const {
    check_positive(f.shape, "gamma shape p");
    check_positive(f.rate, "gamma rate beta");
  }
  void operator()(const InverseGaussianFamily& f) const {
    check_positive(f.delta, "delta");
    check_positive(f.gamma, "gamma");
  }
  void operator()(const MixedStableFamily& f) const {
    check_weights(f.weights, f.alphas.size());
    for (double a : f.alphas) check_alpha(a);
  }
  void operator()(const MixedTemperedFamily& f) const {
    check_weights(f.weights, f.alphas.size());
    if (f.nus.size() != f.alphas.size()) {
      throw_out_of_range("mixed tempered: alphas and nus differ in length");
    }
    for (double a : f.alphas) check_alpha(a);
    for (double n : f.nus) check_positive(n, "nu");
  }
};

double tempered_exponent(double alpha, double nu, double s) {
  // (s+nu)^a - nu^a without cancellation for small s.
  return std::pow(nu, alpha) * std::expm1(alpha * std::log1p(s / nu));
}

double stable_unit_draw(double alpha, RandomStream& rng) {
  // Kanter's representation of the one-sided stable law with LT exp(-s^alpha).
  const double u = std::numbers::pi * rng.uniform_open();
  const double e = rng.exponential();
  const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return a * b;
}

double stable_draw(double alpha, double t, RandomStream& rng) {
  return std::pow(t, 1.0 / alpha) * stable_unit_draw(alpha, rng);
}

constexpr double kMinAcceptance = 1e-4;
constexpr std::size_t kRejectionGuard = 10'000'000;

double tempered_draw(double alpha, double nu, double t, RandomStream& rng) {
  // Exponential tilting: accept a stable(t) draw x with probability e^{-nu x};
  // the acceptance rate is exp(-t nu^alpha).
  const double log_acceptance = -t * std::pow(nu, alpha);
  if (log_acceptance < std::log(kMinAcceptance)) {
    return tempered_draw(alpha, nu, 0.5 * t, rng) + tempered_draw(alpha, nu, 0.5 * t, rng);
  }
  for (std::size_t attempt = 0; attempt < kRejectionGuard; ++attempt) {
    const double x = stable_draw(alpha, t, rng);
    if (rng.uniform_open() < std::exp(-nu * x)) return x;
  }
  std::ostringstream msg;
  msg << "tempered stable rejection exceeded " << kRejectionGuard
      << " attempts (alpha=" << alpha << ", nu=" << nu << ", t=" << t << ")";
  throw Error(ErrorCode::sampler_degeneracy, msg.str());
}

double gamma_draw(double shape, double rate, double t, RandomStream& rng) {
  std::gamma_distribution<double> g(shape * t, 1.0 / rate);
  return g(rng.engine());
}

double inverse_gaussian_draw(double delta, double gamma, double t, RandomStream& rng) {
  // Michael, Schucany and Haas; mean delta t / gamma, shape (delta t)^2.
  const double m = delta * t / gamma;
  const double shape = (delta * t) * (delta * t);
  const double z = rng.normal();
  const double v = z * z;
  const double x = m + m * m * v / (2.0 * shape) -
                   m / (2.0 * shape) * std::sqrt(4.0 * m * shape * v + m * m * v * v);
  if (rng.uniform_open() <= m / (m + x)) return x;
  return m * m / x;
}

}  // namespace

SubordinatorSpec::SubordinatorSpec(SubordinatorFamily family) : family_(std::move(family)) {
  std::visit(Validator{}, family_);
}

SubordinatorSpec SubordinatorSpec::stable(double alpha) {
  return SubordinatorSpec(StableFamily{alpha});
}
SubordinatorSpec SubordinatorSpec::tempered_stable(double alpha, double nu) {
  return SubordinatorSpec(TemperedStableFamily{alpha, nu});
}
SubordinatorSpec SubordinatorSpec::gamma(double shape, double rate) {
  return SubordinatorSpec(GammaFamily{shape, rate});
}
SubordinatorSpec SubordinatorSpec::inverse_gaussian(double delta, double gamma) {
  return SubordinatorSpec(InverseGaussianFamily{delta, gamma});
}
SubordinatorSpec SubordinatorSpec::mixed_stable(std::vector<double> weights,
                                                std::vector<double> alphas) {
  return SubordinatorSpec(MixedStableFamily{std::move(weights), std::move(alphas)});
}
SubordinatorSpec SubordinatorSpec::mixed_tempered(std::vector<double> weights,
                                                  std::vector<double> alphas,
                                                  std::vector<double> nus) {
  return SubordinatorSpec(
      MixedTemperedFamily{std::move(weights), std::move(alphas), std::move(nus)});
}

std::string_view SubordinatorSpec::family_name() const noexcept {
  switch (family_.index()) {
    case 0: return "stable";
    case 1: return "tempered_stable";
    case 2: return "gamma";
    case 3: return "inverse_gaussian";
    case 4: return "mixed_stable";
    default: return "mixed_tempered";
  }
}

bool SubordinatorSpec::is_power_law() const noexcept {
  return std::holds_alternative<StableFamily>(family_) ||
         std::holds_alternative<MixedStableFamily>(family_);
}

bool UnitMoments::finite() const noexcept {
  return std::isfinite(mean) && std::isfinite(second_moment);
}

double laplace_exponent(const SubordinatorSpec& spec, double s) {
  if (!(s >= 0.0)) throw_out_of_range("laplace_exponent: s must be >= 0");
  struct V {
    double s;
    double operator()(const StableFamily& f) const { return std::pow(s, f.alpha); }
    double operator()(const TemperedStableFamily& f) const {
      return tempered_exponent(f.alpha, f.nu, s);
    }
    double operator()(const GammaFamily& f) const { return f.shape * std::log1p(s / f.rate); }
    double operator()(const InverseGaussianFamily& f) const {
      // delta (sqrt(2s + g^2) - g), rationalized.
      return f.delta * 2.0 * s / (std::sqrt(2.0 * s + f.gamma * f.gamma) + f.gamma);
    }
    double operator()(const MixedStableFamily& f) const {
      double r = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) r += f.weights[i] * std::pow(s, f.alphas[i]);
      return r;
    }
    double operator()(const MixedTemperedFamily& f) const {
      double r = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        r += f.weights[i] * tempered_exponent(f.alphas[i], f.nus[i], s);
      }
      return r;
    }
  };
  return std::visit(V{s}, spec.family());
}

namespace {

// Coefficients of (base + slope (u-1))^power = base^power (1 + r (u-1))^power.
std::vector<double> power_jet(double base, double ratio, double power, std::size_t order) {
  std::vector<double> c(order + 1);
  const double lead = std::pow(base, power);
  double binom = 1.0;
  double rp = 1.0;
  for (std::size_t j = 0; j <= order; ++j) {
    c[j] = lead * binom * rp;
    binom *= (power - static_cast<double>(j)) / static_cast<double>(j + 1);
    rp *= ratio;
  }
  return c;
}

std::vector<double> stable_jet(double alpha, double lambda, std::size_t order) {
  return power_jet(lambda, 1.0, alpha, order);
}

std::vector<double> tempered_jet(double alpha, double nu, double lambda, std::size_t order) {
  auto c = power_jet(lambda + nu, lambda / (lambda + nu), alpha, order);
  c[0] = tempered_exponent(alpha, nu, lambda);
  return c;
}

}  // namespace

Jet taylor_coeffs_at(const SubordinatorSpec& spec, double lambda, std::size_t order) {
  if (!(lambda > 0.0)) throw_out_of_range("lambda must be > 0");
  struct V {
    double lambda;
    std::size_t order;
    std::vector<double> operator()(const StableFamily& f) const {
      return stable_jet(f.alpha, lambda, order);
    }
    std::vector<double> operator()(const TemperedStableFamily& f) const {
      return tempered_jet(f.alpha, f.nu, lambda, order);
    }
    std::vector<double> operator()(const GammaFamily& f) const {
      // p log(1 + lambda u / beta) = p log((beta+lambda)/beta) + p log(1 + r (u-1)).
      std::vector<double> c(order + 1);
      const double r = lambda / (f.rate + lambda);
      c[0] = f.shape * std::log1p(lambda / f.rate);
      double rp = 1.0;
      for (std::size_t j = 1; j <= order; ++j) {
        rp *= r;
        c[j] = f.shape * ((j % 2 == 1) ? 1.0 : -1.0) * rp / static_cast<double>(j);
      }
      return c;
    }
    std::vector<double> operator()(const InverseGaussianFamily& f) const {
      const double base = 2.0 * lambda + f.gamma * f.gamma;
      auto c = power_jet(base, 2.0 * lambda / base, 0.5, order);
      for (auto& v : c) v *= f.delta;
      c[0] = f.delta * 2.0 * lambda / (std::sqrt(base) + f.gamma);
      return c;
    }
    std::vector<double> operator()(const MixedStableFamily& f) const {
      std::vector<double> c(order + 1, 0.0);
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        auto ci = stable_jet(f.alphas[i], lambda, order);
        for (std::size_t j = 0; j <= order; ++j) c[j] += f.weights[i] * ci[j];
      }
      return c;
    }
    std::vector<double> operator()(const MixedTemperedFamily& f) const {
      std::vector<double> c(order + 1, 0.0);
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        auto ci = tempered_jet(f.alphas[i], f.nus[i], lambda, order);
        for (std::size_t j = 0; j <= order; ++j) c[j] += f.weights[i] * ci[j];
      }
      return c;
    }
  };
  return Jet(std::visit(V{lambda, order}, spec.family()));
}

UnitMoments unit_moments(const SubordinatorSpec& spec) {
  struct V {
    UnitMoments from(double mean, double var) const { return {mean, var + mean * mean, var}; }
    UnitMoments operator()(const StableFamily&) const { return {kInf, kInf, kInf}; }
    UnitMoments operator()(const MixedStableFamily&) const { return {kInf, kInf, kInf}; }
    UnitMoments operator()(const TemperedStableFamily& f) const {
      return from(f.alpha * std::pow(f.nu, f.alpha - 1.0),
                  f.alpha * (1.0 - f.alpha) * std::pow(f.nu, f.alpha - 2.0));
    }
    UnitMoments operator()(const GammaFamily& f) const {
      return from(f.shape / f.rate, f.shape / (f.rate * f.rate));
    }
    UnitMoments operator()(const InverseGaussianFamily& f) const {
      return from(f.delta / f.gamma, f.delta / (f.gamma * f.gamma * f.gamma));
    }
    UnitMoments operator()(const MixedTemperedFamily& f) const {
      double mean = 0.0;
      double var = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        const double a = f.alphas[i];
        mean += f.weights[i] * a * std::pow(f.nus[i], a - 1.0);
        var += f.weights[i] * a * (1.0 - a) * std::pow(f.nus[i], a - 2.0);
      }
      return from(mean, var);
    }
  };
  return std::visit(V{}, spec.family());
}

double subordinator_sample(const SubordinatorSpec& spec, double t, RandomStream& rng) {
  if (!(t > 0.0)) throw_out_of_range("subordinator_sample: t must be > 0");
  struct V {
    double t;
    RandomStream& rng;
    double operator()(const StableFamily& f) const { return stable_draw(f.alpha, t, rng); }
    double operator()(const TemperedStableFamily& f) const {
      return tempered_draw(f.alpha, f.nu, t, rng);
    }
    double operator()(const GammaFamily& f) const { return gamma_draw(f.shape, f.rate, t, rng); }
    double operator()(const InverseGaussianFamily& f) const {
      return inverse_gaussian_draw(f.delta, f.gamma, t, rng);
    }
    // Laplace exponents add, so a mixture is a sum of independent components
    // run for time c_i t.
    double operator()(const MixedStableFamily& f) const {
      double x = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        if (f.weights[i] > 0.0) x += stable_draw(f.alphas[i], f.weights[i] * t, rng);
      }
      return x;
    }
    double operator()(const MixedTemperedFamily& f) const {
      double x = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        if (f.weights[i] > 0.0) x += tempered_draw(f.alphas[i], f.nus[i], f.weights[i] * t, rng);
      }
      return x;
    }
  };
  return std::visit(V{t, rng}, spec.family());
}

std::optional<SingularExpansion> power_law_exponent_expansion(
    const SubordinatorSpec& spec, double lambda, double cap) {
  if (const auto* s = spec.get<StableFamily>()) {
    return SingularExpansion(cap, {{s->alpha, std::pow(lambda, s->alpha)}});
  }
  if (const auto* m = spec.get<MixedStableFamily>()) {
    std::vector<SingularExpansion::Term> terms;
    for (std::size_t i = 0; i < m->weights.size(); ++i) {
      terms.push_back({m->alphas[i], m->weights[i] * std::pow(lambda, m->alphas[i])});
    }
    return SingularExpansion(cap, std::move(terms));
  }
  return std::nullopt;
}

}  // namespace geocount
