#include <cmath>
#include <vector>

#include "doctest.h"
#include "geocount/error.hpp"
#include "geocount/gsmpp.hpp"
#include "geocount/shock.hpp"
#include "support.hpp"

using namespace geocount;

namespace {

GsppParams stable_params(double lambda, double alpha, double mu) {
  return {{lambda, SubordinatorSpec::stable(alpha)}, {mu}};
}

GsppParams tempered_params(double lambda, double alpha, double nu, double mu) {
  return {{lambda, SubordinatorSpec::tempered_stable(alpha, nu)}, {mu}};
}

}  // namespace

TEST_CASE("cdf below the support and far above it") {
  const GsmppParams p{tempered_params(0.5, 0.6, 0.5, 0.5), FactorLaw::atoms({0.5, 2.0}, {0.5, 0.5})};
  CHECK(gsmpp_cdf(-1.0, 1.0, p).value == 0.0);
  CHECK(gsmpp_cdf(0.0, 1.0, p).value == 0.0);
  const GsmppParams big{tempered_params(0.5, 0.6, 0.5, 0.5), FactorLaw::atoms({2.0, 3.0}, {0.5, 0.5})};
  CHECK(gsmpp_cdf(0.9, 1.0, big).value == 0.0);
  CHECK(gsmpp_cdf(1e300, 1.0, p).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two point factors against the empirical cdf") {
  const GsmppParams p{tempered_params(0.5, 0.6, 0.5, 0.5), FactorLaw::atoms({0.5, 2.0}, {0.5, 0.5})};
  std::vector<double> levels;
  for (int i = 1; i <= 10; ++i) levels.push_back(0.05 + 0.09 * (i - 1));
  const BandResult band = mc_cdf_band([&](RandomStream& rng) { return gsmpp_sample(1.0, p, rng); },
                                      [&](double y) { return gsmpp_cdf(y, 1.0, p).value; }, levels,
                                      testing::mc(91));
  for (const auto& r : band.reports) INFO(render(r));
  CHECK(band.pass);
}

TEST_CASE("log grid factors against the empirical cdf") {
  // log X uniform on [-1, 0.5).
  const GsmppParams p{tempered_params(0.5, 0.6, 0.5, 0.5),
                      FactorLaw::log_grid(JumpLaw::grid(-1.0, 0.01, std::vector<double>(150, 1.0 / 1.5)))};
  const std::vector<double> levels = {0.1, 0.3, 0.5, 0.7, 0.9};
  const BandResult band = mc_cdf_band([&](RandomStream& rng) { return gsmpp_sample(1.0, p, rng); },
                                      [&](double y) { return gsmpp_cdf(y, 1.0, p).value; }, levels,
                                      testing::mc(92));
  CHECK(band.pass);
}

TEST_CASE("mellin transform trivial cases") {
  const GsmppParams p{stable_params(0.5, 0.7, 1.0), FactorLaw::atoms({0.5, 2.0}, {0.5, 0.5})};
  CHECK(gsmpp_mellin(1.0, 1.0, p) == doctest::Approx(1.0).epsilon(1e-14));
  const GsmppParams one{stable_params(0.5, 0.7, 1.0), FactorLaw::constant(1.0)};
  for (double beta : {0.5, 2.0, 3.5}) CHECK(gsmpp_mellin(beta, 1.0, one) == doctest::Approx(1.0));
  CHECK(gsmpp_mean(1.0, one) == doctest::Approx(1.0));
}

TEST_CASE("mellin transform routes agree") {
  const GsmppParams p{stable_params(0.5, 0.7, 1.0), FactorLaw::atoms({0.25, 0.75}, {0.5, 0.5})};
  const double a = gsmpp_mellin(2.0, 1.0, p);
  const double b = gsmpp_mellin(2.0, 1.0, p, {}, MellinRoute::series);
  const auto pmf = gspp_pmf_generic_table(200, 1.0, p.gspp);
  double direct = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m) direct += pmf[m] * std::pow(0.5, m);
  CHECK(std::abs(a - b) < 1e-9);
  CHECK(std::abs(a - direct) < 1e-9);
}

TEST_CASE("mellin transform outside the radius") {
  const GsmppParams p{stable_params(0.5, 0.7, 1.0), FactorLaw::atoms({0.5, 2.0}, {0.5, 0.5})};
  CHECK_THROWS_AS(gsmpp_mellin(2.0, 1.0, p), ConvergenceError);
}

TEST_CASE("mean with survival factors is the shock reliability") {
  const GsppParams arrivals = stable_params(1.0, 0.6, 1.0);
  for (double q : {0.3, 0.7}) {
    const ExtremeShockModel m{q, arrivals};
    for (const auto& law : {FactorLaw::atoms({0.0, 1.0}, {1.0 - q, q}), FactorLaw::constant(q)}) {
      const GsmppParams p{arrivals, law};
      for (double t : {0.5, 2.0}) {
        CHECK(std::abs(gsmpp_mean(t, p) - extreme_reliability(t, m)) < 1e-12);
      }
    }
  }
}

TEST_CASE("mean against product sampling") {
  const GsmppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), FactorLaw::atoms({0.5, 1.2}, {0.5, 0.5})};
  const auto r = mc_mean([&](RandomStream& rng) { return gsmpp_sample(1.0, p, rng); },
                         gsmpp_mean(1.0, p), testing::mc(93));
  CHECK_REPORT(r);
}

TEST_CASE("zero factors") {
  const GsmppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), FactorLaw::atoms({0.0, 1.0}, {0.3, 0.7})};
  // P[Y = 0] = 1 - pgf(0.7), the rest sits at 1.
  const double survive = gspp_pgf(0.7, 1.0, p.gspp);
  CHECK(gsmpp_cdf(0.0, 1.0, p).value == doctest::Approx(1.0 - survive).epsilon(1e-12));
  CHECK(gsmpp_cdf(0.99, 1.0, p).value == doctest::Approx(1.0 - survive).epsilon(1e-12));
  CHECK(gsmpp_cdf(1.0, 1.0, p).value == doctest::Approx(1.0).epsilon(1e-12));
  const auto r = mc_proportion([&](RandomStream& rng) { return gsmpp_sample(1.0, p, rng) == 0.0; },
                               1.0 - survive, testing::mc(94));
  CHECK_REPORT(r);
}

TEST_CASE("atom at one") {
  const double lambda = 0.8, alpha = 0.6, nu = 0.3, mu = 1.0;
  CHECK(gsmpp_atom_at_one(0.0, lambda, alpha, nu, mu) == 1.0);
  const GsmppParams p{tempered_params(lambda, alpha, nu, mu), FactorLaw::atoms({0.5, 2.0}, {0.5, 0.5})};
  const double atom = gsmpp_atom_at_one(1.0, lambda, alpha, nu, mu);
  CHECK(std::abs(atom - gspp_pmf_generic(0, 1.0, p.gspp)) < 1e-12);
  // Jump of the cdf at 1 for factors that never multiply back to exactly 1.
  const GsmppParams q{tempered_params(lambda, alpha, nu, mu), FactorLaw::atoms({0.6, 1.5}, {0.5, 0.5})};
  const double jump = gsmpp_cdf(1.0, 1.0, q).value - gsmpp_cdf(1.0 - 1e-9, 1.0, q).value;
  CHECK(std::abs(jump - atom) < 1e-9);
  const auto r = mc_proportion(
      [&](RandomStream& rng) { return gspp_sample(1.0, p.gspp, rng) == 0; }, atom, testing::mc(95));
  CHECK_REPORT(r);
}

TEST_CASE("tempered cdf series route") {
  const double lambda = 0.5, alpha = 0.6, nu = 0.05, mu = 0.5, t = 0.5;
  const FactorLaw law = FactorLaw::atoms({0.5, 2.0}, {0.5, 0.5});
  const GsmppParams p{tempered_params(lambda, alpha, nu, mu), law};
  for (double y : {0.3, 1.0, 2.5}) {
    const CompoundCdf a = gsmpp_tempered_cdf(y, t, lambda, alpha, nu, mu, law);
    CHECK(a.warnings.empty());
    CHECK(std::abs(a.value - gsmpp_cdf(y, t, p).value) < 1e-8);
  }
  const CompoundCdf out = gsmpp_tempered_cdf(1.0, 1.0, 0.5, 0.6, 1.0, 1.0, law);
  CHECK_FALSE(out.warnings.empty());
}

TEST_CASE("log product sampling") {
  const GsmppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), FactorLaw::atoms({0.5, 3.0}, {0.4, 0.6})};
  const double count_mean = gspp_moments(1.0, p.gspp).mean;
  const auto r = mc_mean([&](RandomStream& rng) { return std::log(gsmpp_sample(1.0, p, rng)); },
                         count_mean * p.factors.mean_log(), testing::mc(96));
  CHECK_REPORT(r);
  RandomStream rng(1);
  CHECK(gsmpp_sample(0.0, p, rng) == 1.0);
}

TEST_CASE("constant factors push the count law forward") {
  const GsmppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), FactorLaw::constant(2.0)};
  const auto pmf = gspp_pmf_generic_table(30, 1.0, p.gspp);
  const double tv = mc_pmf_tv(
      [&](RandomStream& rng) {
        return static_cast<std::uint64_t>(std::llround(std::log2(gsmpp_sample(1.0, p, rng))));
      },
      pmf, testing::mc(97));
  CHECK(tv < 0.01);
}
