// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "geocount/error.hpp"
#include "geocount/format.hpp"
#include "geocount/gscpp.hpp"
#include "geocount/gsmpp.hpp"
#include "geocount/mc.hpp"
#include "geocount/shock.hpp"

using namespace geocount;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

McOptions opts(std::uint64_t seed) {
  McOptions o;
  o.n = 100'000;
  o.seed = seed;
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

GsppParams stable_params(double lambda, double alpha, double mu) {
  return {{lambda, SubordinatorSpec::stable(alpha)}, {mu}};
}

GsppParams tempered_params(double lambda, double alpha, double nu, double mu) {
  return {{lambda, SubordinatorSpec::tempered_stable(alpha, nu)}, {mu}};
}

Outcome gcp_law() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const GcpParams p{1.0};
  std::vector<double> pmf;
  for (int k = 0; k < 40; ++k) pmf.push_back(gcp_pmf(k, 1.0, p));
  const double tv = mc_pmf_tv(
      [&](RandomStream& rng) { return gcp_sample_path(p, 1.0, rng).count_at(1.0); }, pmf,
      opts(1001));
  const double secs = seconds_since(start);
  o.require(tv < 0.01, "TV " + num(tv));
  o.require(secs < 5.0, "runtime " + num(secs) + " s");
  o.note("TV=" + num(tv) + " runtime=" + num(secs) + "s");
  return o;
}

Outcome moments() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto p = tempered_params(1.0, 0.6, 1.0, 1.0);
  const MomentTriple m = gspp_moments(2.0, p);
  o.require(std::abs(m.mean - 1.2) < 1e-12, "closed-form mean " + num(m.mean));
  auto draw = [&](RandomStream& rng) { return static_cast<double>(gspp_sample(2.0, p, rng)); };
  const McReport mean = mc_mean(draw, m.mean, opts(1002));
  const McReport var = mc_variance(draw, m.variance, opts(1003));
  const double secs = seconds_since(start);
  o.require(mean.pass, "mean " + render(mean));
  o.require(var.pass, "variance " + render(var));
  o.require(secs < 30.0, "runtime " + num(secs) + " s");
  o.note("mean |d|/se=" + num(std::abs(mean.estimate - mean.target) / mean.std_error) +
         " var |d|/se=" + num(std::abs(var.estimate - var.target) / var.std_error) +
         " runtime=" + num(secs) + "s");
  return o;
}

Outcome triple_agreement() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const double lambda = 0.5, alpha = 0.7, mu = 1.0, t = 1.0;
  const auto p = stable_params(lambda, alpha, mu);
  const auto jet = gspp_pmf_generic_table(15, t, p);
  double worst = 0.0;
  for (std::uint64_t k = 0; k <= 15; ++k) {
    const double series = gspp_pmf_sfpp(k, t, lambda, alpha, mu);
    const double cond =
        gspp_pmf_conditioning(k, t, mu, [&](std::uint64_t j, double n) {
          return spp_pmf_sfpp(j, n, lambda, alpha);
        }).value;
    worst = std::max({worst, std::abs(jet[k] - series), std::abs(jet[k] - cond),
                      std::abs(series - cond)});
  }
  const double secs = seconds_since(start);
  o.require(worst < 1e-8, "max diff " + num(worst));
  o.require(secs < 10.0, "runtime " + num(secs) + " s");
  o.note("max diff=" + num(worst) + " runtime=" + num(secs) + "s");
  return o;
}

Outcome normalization() {
  Outcome o;
  const std::vector<double> grid = {0.5, 1.0, 2.0};
  const std::vector<SubordinatorSpec> families = {
      SubordinatorSpec::stable(0.6), SubordinatorSpec::tempered_stable(0.6, 1.0),
      SubordinatorSpec::gamma(2.0, 1.0), SubordinatorSpec::inverse_gaussian(1.0, 1.0)};
  double worst = 0.0;
  int count = 0;
  auto check = [&](const Pmf& pmf, const std::string& label) {
    const double err = std::abs(pmf.total_mass() - 1.0);
    worst = std::max(worst, err);
    ++count;
    o.require(err <= 1e-6, label + " mass " + num(pmf.total_mass()));
  };
  for (double a : grid) {
    for (double b : grid) {
      check(gcp_pmf_table(b, {a}), "gcp");
      for (const auto& f : families) {
        const std::string label = std::string(f.family_name()) + " lambda=" + num(a) + " t=" + num(b);
        check(spp_pmf_adaptive(b, {a, f}), "spp " + label);
        check(gspp_pmf_adaptive(b, {{a, f}, {1.0}}), "gspp " + label);
      }
    }
  }
  o.note(std::to_string(count) + " pmfs, max |mass-1|=" + num(worst));
  return o;
}

Outcome tempered_reduction() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t k = 0; k <= 10; ++k) {
    worst = std::max(worst, std::abs(spp_pmf_tsfpp(k, 1.0, 1.0, 0.6, 0.0) -
                                     spp_pmf_sfpp(k, 1.0, 1.0, 0.6)));
    worst = std::max(worst, std::abs(gspp_pmf_tsfpp(k, 1.0, 0.5, 0.7, 0.0, 1.0) -
                                     gspp_pmf_sfpp(k, 1.0, 0.5, 0.7, 1.0)));
  }
  o.require(worst <= 1e-10, "max diff " + num(worst));
  o.note("max diff=" + num(worst));
  return o;
}

Outcome dispersion() {
  Outcome o;
  const double lambda = 1.0, alpha = 0.6, nu = 1.0, mu = 1.0;
  const auto p = tempered_params(lambda, alpha, nu, mu);
  double min_index = 1e300;
  double worst = 0.0;
  for (double t = 0.25; t <= 20.0; t += 0.25) {
    const double i = dispersion_index(t, lambda, alpha, nu, mu);
    const MomentTriple m = gspp_moments(t, p);
    min_index = std::min(min_index, i);
    worst = std::max(worst, std::abs(i * m.mean - m.variance) / m.variance);
    o.require(i > 1.0, "I(" + num(t) + ")=" + num(i));
  }
  o.require(worst <= 1e-12, "relative identity error " + num(worst));
  o.note("min I=" + num(min_index) + " max rel |I*mean-var|=" + num(worst));
  return o;
}

Outcome correlation_asymptote() {
  Outcome o;
  const double s = 1.0, lambda = 1.0, mu = 1.0, t = 1e4;
  // f(s) = s: N(G(t)) given G is Poisson(lambda G).
  auto poisson_triple = [&](double u) {
    MomentTriple m;
    m.mean = lambda * mu * u;
    m.variance = lambda * mu * u + lambda * lambda * mu * u * (1.0 + mu * u);
    m.cov = [=](double a, double b) {
      const double lo = std::min(a, b), hi = std::max(a, b);
      return lambda * mu * lo + lambda * lambda * mu * lo * (1.0 + mu * hi);
    };
    return m;
  };
  const double poisson = correlation(poisson_triple(s), poisson_triple(t), s, t) * t;
  const double poisson_ref = correlation_asymptote_poisson(s, lambda, mu);
  const double rel_p = std::abs(poisson - poisson_ref) / poisson_ref;
  o.require(rel_p <= 0.02, "f(s)=s: Corr*t=" + num(poisson) + " limit=" + num(poisson_ref));

  const double alpha = 0.6, nu = 1.0;
  const double tempered = correlation(s, t, tempered_params(lambda, alpha, nu, mu)) * t;
  const double tempered_ref = correlation_asymptote_tempered(s, lambda, alpha, nu, mu);
  const double rel_t = std::abs(tempered - tempered_ref) / tempered_ref;
  o.require(rel_t <= 0.02, "tempered: Corr*t=" + num(tempered) + " limit=" + num(tempered_ref));
  o.note("Corr(t,s) itself tends to " +
         num(correlation_limit(s, tempered_params(lambda, alpha, nu, mu))) +
         " (tempered), so Corr*t grows linearly");
  return o;
}

Outcome extreme_shock() {
  Outcome o;
  const ExtremeShockModel m{0.7, stable_params(1.0, 0.6, 1.0)};
  const std::vector<double> grid = {0.5, 1.0, 2.0, 4.0};
  const auto reports = extreme_mc(grid, m, opts(1008));
  double worst_z = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    o.require(reports[i].pass, "t=" + num(grid[i]) + " " + render(reports[i]));
    worst_z = std::max(worst_z, std::abs(reports[i].estimate - reports[i].target) /
                                    reports[i].std_error);
  }
  double worst_rate = 0.0;
  for (double t : grid) {
    const double h = 1e-4 * t;
    const double d = -(std::log(extreme_reliability(t + h, m)) -
                       std::log(extreme_reliability(t - h, m))) / (2 * h);
    const double r = extreme_failure_rate(t, m);
    worst_rate = std::max(worst_rate, std::abs(d - r) / r);
  }
  o.require(worst_rate <= 1e-6, "failure-rate identity " + num(worst_rate));
  o.note("max |d|/se=" + num(worst_z) + " failure-rate rel err=" + num(worst_rate));
  return o;
}

std::string run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full = {"geocount"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out;
  std::ostringstream err;
  if (cli::run(full, out, err) != 0) return "<exit error> " + err.str();
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path + ">";
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome sweeps() {
  Outcome o;
  const ExtremeShockModel base{0.7, stable_params(1.0, 0.6, 1.0)};
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(0.5 * i);
  const struct {
    SweepParameter p;
    std::vector<double> values;
  } cases[] = {{SweepParameter::q, {0.5, 0.7, 0.9}},
               {SweepParameter::alpha, {0.4, 0.6, 0.8}},
               {SweepParameter::lambda, {0.5, 1.0, 2.0}},
               {SweepParameter::mu, {0.5, 1.0, 2.0}}};
  for (const auto& c : cases) {
    for (SweepQuantity q : {SweepQuantity::reliability, SweepQuantity::failure_rate}) {
      const SweepTable table = sensitivity_sweep(base, c.p, c.values, t, q);
      o.require(sweep_is_ordered(table, expected_direction(c.p, q)),
                std::string(sweep_parameter_name(c.p)) + "/" +
                    std::string(sweep_quantity_name(q)) + " ordering");
      const std::string name = "sweep_" + std::string(sweep_parameter_name(c.p)) + "_" +
                               std::string(sweep_quantity_name(q)) + ".csv";
      const std::string first = run_cli({"sweep", "--parameter", std::string(sweep_parameter_name(c.p)),
                                         "--quantity", std::string(sweep_quantity_name(q))});
      o.require(first == slurp(std::string(GOLDEN_DIR) + "/" + name), name + " differs from golden");
    }
  }
  const std::vector<std::string> mc_args = {"sweep", "--parameter", "q", "--t-grid", "0.5,1,2,4",
                                            "--mc", "--n", "5000", "--seed", "7"};
  o.require(run_cli(mc_args) == slurp(std::string(GOLDEN_DIR) + "/sweep_q_reliability_mc.csv"),
            "seeded Monte Carlo sweep differs from golden");
  o.note("4 parameters x 2 quantities ordered; 9 golden CSVs compared");
  return o;
}

Outcome cumulative_shock() {
  Outcome o;
  std::uint64_t seed = 1010;
  for (std::uint64_t threshold : {1u, 3u, 5u}) {
    const CumulativeShockModel m{threshold, {1.0}, {1.0, SubordinatorSpec::stable(0.6)}};
    const McReport r = cumulative_mc(1.0, m, opts(++seed));
    o.require(r.pass, "T=" + std::to_string(threshold) + " " + render(r));
    o.note("T=" + std::to_string(threshold) + " |d|/se=" +
           num(std::abs(r.estimate - r.target) / r.std_error));
  }
  return o;
}

Outcome collapses() {
  Outcome o;
  const auto gp = tempered_params(0.8, 0.6, 0.3, 1.0);
  const GscppParams unit{gp, JumpLaw::degenerate(1)};
  double worst_pmf = 0.0;
  for (std::uint64_t k = 0; k <= 15; ++k) {
    worst_pmf = std::max(worst_pmf,
                         std::abs(gscpp_pmf_discrete(k, 1.0, unit) - gspp_pmf_generic(k, 1.0, gp)));
  }
  o.require(worst_pmf <= 1e-10, "unit jumps " + num(worst_pmf));
  double worst_atom = 0.0;
  for (double t : {0.5, 1.0, 3.0}) {
    worst_atom = std::max(worst_atom, std::abs(gsmpp_atom_at_one(t, 0.8, 0.6, 0.3, 1.0) -
                                               gspp_pmf_generic(0, t, gp)));
  }
  o.require(worst_atom <= 1e-12, "atom " + num(worst_atom));
  double worst_mean = 0.0;
  const auto arrivals = stable_params(1.0, 0.6, 1.0);
  for (double q : {0.3, 0.7, 0.9}) {
    const GsmppParams p{arrivals, FactorLaw::atoms({0.0, 1.0}, {1.0 - q, q})};
    const ExtremeShockModel m{q, arrivals};
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
      worst_mean = std::max(worst_mean, std::abs(gsmpp_mean(t, p) - extreme_reliability(t, m)));
    }
  }
  o.require(worst_mean <= 1e-12, "gsmpp mean " + num(worst_mean));
  o.note("pmf=" + num(worst_pmf) + " atom=" + num(worst_atom) + " mean=" + num(worst_mean));
  return o;
}

Outcome laplace() {
  Outcome o;
  const std::vector<SubordinatorSpec> families = {
      SubordinatorSpec::stable(0.6), SubordinatorSpec::tempered_stable(0.6, 1.0),
      SubordinatorSpec::gamma(2.0, 1.0), SubordinatorSpec::inverse_gaussian(1.0, 1.0)};
  std::uint64_t seed = 1020;
  double worst = 0.0;
  for (const auto& f : families) {
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const McReport r = mc_laplace(
          [&](RandomStream& rng) { return subordinator_sample(f, 1.0, rng); }, s,
          std::exp(-laplace_exponent(f, s)), opts(++seed));
      o.require(r.pass, std::string(f.family_name()) + " s=" + num(s) + " " + render(r));
      worst = std::max(worst, std::abs(r.estimate - r.target) / r.std_error);
    }
  }
  o.note("20 points, max |d|/se=" + num(worst));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"geometric counting law", gcp_law},
      {"moments by simulation", moments},
      {"pmf triple agreement", triple_agreement},
      {"normalization", normalization},
      {"tempered reduction", tempered_reduction},
      {"overdispersion", dispersion},
      {"correlation asymptote", correlation_asymptote},
      {"extreme shock", extreme_shock},
      {"sensitivity orderings and golden files", sweeps},
      {"cumulative shock", cumulative_shock},
      {"compound and multiplicative collapses", collapses},
      {"subordinator laplace transforms", laplace},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
