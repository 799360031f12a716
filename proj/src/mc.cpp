#include "geocount/mc.hpp"

#include <cmath>
#include <sstream>

#include "geocount/error.hpp"
#include "geocount/numerics.hpp"

namespace geocount {

namespace {

constexpr std::size_t kMinSamples = 100;

void check_options(const McOptions& opt) {
  if (opt.n < kMinSamples) throw_out_of_range("Monte Carlo needs at least 100 samples");
  if (!(opt.k_se > 0.0)) throw_out_of_range("k_se must be > 0");
}

// Running moments of a chunk, merged in chunk order.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double first = 0.0;
  bool constant = true;

  void add(double x) {
    if (n == 0.0) first = x;
    if (x != first) constant = false;
    const double n1 = n;
    n += 1.0;
    const double delta = x - mean;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean += dn;
    m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
    m3 += term1 * dn * (n - 2.0) - 3.0 * dn * m2;
    m2 += term1;
  }

  void merge(const Moments& b) {
    if (b.n == 0.0) return;
    if (n == 0.0) {
      *this = b;
      return;
    }
    if (b.constant && constant && b.first == first) {
      n += b.n;
      return;
    }
    const double na = n;
    const double nb = b.n;
    const double nt = na + nb;
    const double delta = b.mean - mean;
    const double d2 = delta * delta;
    const double d3 = d2 * delta;
    const double d4 = d2 * d2;
    const double m4n = m4 + b.m4 + d4 * na * nb * (na * na - na * nb + nb * nb) / (nt * nt * nt) +
                       6.0 * d2 * (na * na * b.m2 + nb * nb * m2) / (nt * nt) +
                       4.0 * delta * (na * b.m3 - nb * m3) / nt;
    const double m3n = m3 + b.m3 + d3 * na * nb * (na - nb) / (nt * nt) +
                       3.0 * delta * (na * b.m2 - nb * m2) / nt;
    m2 = m2 + b.m2 + d2 * na * nb / nt;
    m3 = m3n;
    m4 = m4n;
    mean += delta * nb / nt;
    n = nt;
    constant = false;
  }
};

Moments collect(const RealSampler& sampler, const McOptions& opt) {
  auto chunks = detail::run_chunks<Moments>(opt.n, opt.seed, opt.threads,
                                            [&](std::size_t count, RandomStream& rng) {
                                              Moments m;
                                              for (std::size_t i = 0; i < count; ++i) {
                                                m.add(sampler(rng));
                                              }
                                              return m;
                                            });
  Moments total;
  for (const auto& c : chunks) total.merge(c);
  return total;
}

McReport make_report(double estimate, double se, double target, const McOptions& opt) {
  McReport r;
  r.estimate = estimate;
  r.std_error = se;
  r.n = opt.n;
  r.target = target;
  r.k_se = opt.k_se;
  r.pass = mc_verdict(estimate, se, target, opt.k_se);
  return r;
}

}  // namespace

bool mc_verdict(double estimate, double std_error, double target, double k_se) {
  const double diff = std::abs(estimate - target);
  if (std_error == 0.0) return diff <= 1e-12 * std::max(1.0, std::abs(target));
  return diff <= k_se * std_error;
}

std::string render(const McReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "estimate=" << r.estimate << " stderr=" << r.std_error << " n=" << r.n
     << " target=" << r.target << " |diff|/se="
     << (r.std_error > 0.0 ? std::abs(r.estimate - r.target) / r.std_error : 0.0)
     << (r.pass ? " PASS" : " FAIL") << (r.degenerate ? " (degenerate)" : "");
  return os.str();
}

McReport mc_mean(const RealSampler& sampler, double target, const McOptions& opt,
                 double target_variance) {
  check_options(opt);
  const Moments m = collect(sampler, opt);
  const double var = m.n > 1.0 ? m.m2 / (m.n - 1.0) : 0.0;
  McReport r = make_report(m.mean, std::sqrt(var / m.n), target, opt);
  if (m.constant && target_variance > 0.0) {
    r.degenerate = true;
    r.pass = false;
  }
  return r;
}

McReport mc_variance(const RealSampler& sampler, double target, const McOptions& opt) {
  check_options(opt);
  const Moments m = collect(sampler, opt);
  const double n = m.n;
  const double s2 = m.m2 / (n - 1.0);
  const double mu4 = m.m4 / n;
  const double var_s2 = std::max(0.0, (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n);
  return make_report(s2, std::sqrt(var_s2), target, opt);
}

McReport mc_proportion(const EventSampler& sampler, double target, const McOptions& opt) {
  check_options(opt);
  auto chunks = detail::run_chunks<std::size_t>(opt.n, opt.seed, opt.threads,
                                                [&](std::size_t count, RandomStream& rng) {
                                                  std::size_t hits = 0;
                                                  for (std::size_t i = 0; i < count; ++i) {
                                                    hits += sampler(rng) ? 1 : 0;
                                                  }
                                                  return hits;
                                                });
  std::size_t hits = 0;
  for (auto h : chunks) hits += h;
  const double p = static_cast<double>(hits) / static_cast<double>(opt.n);
  return make_report(p, std::sqrt(p * (1.0 - p) / static_cast<double>(opt.n)), target, opt);
}

double mc_pmf_tv(const CountSampler& sampler, std::span<const double> pmf, const McOptions& opt) {
  check_options(opt);
  const std::size_t K = pmf.size();
  auto chunks = detail::run_chunks<std::vector<std::size_t>>(
      opt.n, opt.seed, opt.threads, [&](std::size_t count, RandomStream& rng) {
        std::vector<std::size_t> h(K + 1, 0);
        for (std::size_t i = 0; i < count; ++i) {
          const std::uint64_t k = sampler(rng);
          ++h[k < K ? static_cast<std::size_t>(k) : K];
        }
        return h;
      });
  std::vector<std::size_t> hist(K + 1, 0);
  for (const auto& h : chunks) {
    for (std::size_t i = 0; i <= K; ++i) hist[i] += h[i];
  }
  const double n = static_cast<double>(opt.n);
  CompensatedSum<double> tv;
  CompensatedSum<double> stored;
  for (std::size_t k = 0; k < K; ++k) {
    tv.add(std::abs(static_cast<double>(hist[k]) / n - pmf[k]));
    stored.add(pmf[k]);
  }
  const double tail = std::max(0.0, 1.0 - stored.value());
  tv.add(std::abs(static_cast<double>(hist[K]) / n - tail));
  return 0.5 * tv.value();
}

BandResult mc_cdf_band(const RealSampler& sampler, const std::function<double(double)>& cdf,
                       std::span<const double> levels, const McOptions& opt) {
  check_options(opt);
  BandResult out;
  // Pilot sample on a separate stream family fixes the evaluation points.
  McOptions pilot_opt = opt;
  pilot_opt.n = std::min<std::size_t>(opt.n, 20'000);
  pilot_opt.seed = splitmix64(opt.seed ^ 0x9E3779B97F4A7C15ULL);
  auto pilot_chunks = detail::run_chunks<std::vector<double>>(
      pilot_opt.n, pilot_opt.seed, opt.threads, [&](std::size_t count, RandomStream& rng) {
        std::vector<double> v(count);
        for (auto& x : v) x = sampler(rng);
        return v;
      });
  std::vector<double> pilot;
  for (const auto& c : pilot_chunks) pilot.insert(pilot.end(), c.begin(), c.end());
  std::sort(pilot.begin(), pilot.end());
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) throw_out_of_range("quantile levels must lie in (0, 1)");
    const auto idx = static_cast<std::size_t>(level * static_cast<double>(pilot.size() - 1));
    out.points.push_back(pilot[idx]);
  }
  const std::size_t P = out.points.size();
  auto chunks = detail::run_chunks<std::vector<std::size_t>>(
      opt.n, opt.seed, opt.threads, [&](std::size_t count, RandomStream& rng) {
        std::vector<std::size_t> below(P, 0);
        for (std::size_t i = 0; i < count; ++i) {
          const double x = sampler(rng);
          for (std::size_t j = 0; j < P; ++j) below[j] += x <= out.points[j] ? 1 : 0;
        }
        return below;
      });
  std::vector<std::size_t> below(P, 0);
  for (const auto& c : chunks) {
    for (std::size_t j = 0; j < P; ++j) below[j] += c[j];
  }
  out.pass = true;
  const double n = static_cast<double>(opt.n);
  for (std::size_t j = 0; j < P; ++j) {
    const double target = cdf(out.points[j]);
    const double se = std::sqrt(std::max(target * (1.0 - target), 1.0 / n) / n);
    McReport r = make_report(static_cast<double>(below[j]) / n, se, target, opt);
    out.pass = out.pass && r.pass;
    out.reports.push_back(r);
  }
  return out;
}

McReport mc_laplace(const RealSampler& sampler, double s, double target, const McOptions& opt) {
  return mc_mean([&](RandomStream& rng) { return std::exp(-s * sampler(rng)); }, target, opt);
}

}  // namespace geocount
