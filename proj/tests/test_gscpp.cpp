#include <cmath>
#include <vector>

#include "doctest.h"
#include "geocount/error.hpp"
#include "geocount/gscpp.hpp"
#include "support.hpp"

using namespace geocount;

namespace {

GsppParams tempered_params(double lambda, double alpha, double nu, double mu) {
  return {{lambda, SubordinatorSpec::tempered_stable(alpha, nu)}, {mu}};
}

}  // namespace

TEST_CASE("unit jumps give the counting moments") {
  const GscppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), JumpLaw::degenerate(1)};
  const MomentTriple a = gscpp_moments(1.5, p);
  const MomentTriple b = gspp_moments(1.5, p.gspp);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-14));
  CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-14));
  CHECK(a.cov(0.5, 1.5) == doctest::Approx(b.cov(0.5, 1.5)).epsilon(1e-14));
  const MomentTriple z = gscpp_moments(0.0, p);
  CHECK(z.mean == 0.0);
  CHECK(z.variance == 0.0);
}

TEST_CASE("bernoulli jumps halve the mean") {
  const GscppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), JumpLaw::bernoulli(0.5)};
  CHECK(gscpp_moments(1.0, p).mean == doctest::Approx(0.3));
}

TEST_CASE("empty sum atom") {
  const GscppParams p{tempered_params(1.0, 0.6, 1.0, 2.0), JumpLaw::bernoulli(0.3)};
  const double f = laplace_exponent(p.gspp.spp.sub, 1.0);
  CHECK(gscpp_empty_sum_atom(0.7, p) ==
        doctest::Approx(1.0 / (1.0 + 2.0 * 0.7 * (1.0 - std::exp(-f)))));
}

TEST_CASE("unit jumps give the counting pmf") {
  const GscppParams p{tempered_params(0.8, 0.5, 0.5, 1.0), JumpLaw::degenerate(1)};
  for (std::uint64_t k = 0; k <= 10; ++k) {
    CHECK(std::abs(gscpp_pmf_discrete(k, 1.0, p) - gspp_pmf_generic(k, 1.0, p.gspp)) < 1e-10);
  }
}

TEST_CASE("discrete pmf routes agree") {
  const GscppParams p{tempered_params(0.8, 0.5, 0.5, 1.0), JumpLaw::discrete({0.2, 0.5, 0.3})};
  double total = 0.0;
  for (std::uint64_t k = 0; k <= 12; ++k) {
    const double a = gscpp_pmf_discrete(k, 1.0, p);
    const double b = gscpp_pmf_discrete(k, 1.0, p, {}, PmfRoute::conditioning);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
    CHECK(a >= 0.0);
    total += a;
  }
  CHECK(total <= 1.0 + 1e-12);
}

TEST_CASE("bernoulli jumps match the sampler") {
  const GscppParams p{tempered_params(0.5, 0.6, 0.5, 0.5), JumpLaw::bernoulli(0.5)};
  std::vector<double> pmf;
  for (std::uint64_t k = 0; k <= 25; ++k) pmf.push_back(gscpp_pmf_discrete(k, 1.0, p));
  const double tv = mc_pmf_tv(
      [&](RandomStream& rng) { return static_cast<std::uint64_t>(gscpp_sample(1.0, p, rng)); },
      pmf, testing::mc(81));
  CHECK(tv < 0.01);
}

TEST_CASE("cdf limits") {
  const GscppParams p{tempered_params(0.5, 0.6, 0.5, 0.5), JumpLaw::exponential_grid(1.0, 0.01, 3000)};
  CHECK(gscpp_cdf(-0.5, 1.0, p).value == 0.0);
  const CompoundCdf far = gscpp_cdf(1e3, 1.0, p);
  CHECK(far.value == doctest::Approx(1.0).epsilon(1e-9));
  const CompoundCdf at0 = gscpp_cdf(0.0, 1.0, p);
  CHECK(at0.value == doctest::Approx(gscpp_empty_sum_atom(1.0, p)).epsilon(1e-9));
}

TEST_CASE("coarse grids get a resolution warning") {
  const GscppParams p{tempered_params(0.5, 0.6, 0.5, 0.5), JumpLaw::exponential_grid(1.0, 0.5, 60)};
  const CompoundCdf c = gscpp_cdf(1.0, 1.0, p);
  CHECK_FALSE(c.warnings.empty());
}

TEST_CASE("exponential jumps against the empirical cdf") {
  const GscppParams p{tempered_params(0.5, 0.6, 0.5, 0.5), JumpLaw::exponential_grid(1.0, 0.005, 6000)};
  std::vector<double> levels;
  for (int i = 1; i <= 10; ++i) levels.push_back(0.05 + 0.09 * (i - 1));
  const BandResult band = mc_cdf_band([&](RandomStream& rng) { return gscpp_sample(1.0, p, rng); },
                                      [&](double y) { return gscpp_cdf(y, 1.0, p).value; }, levels,
                                      testing::mc(82));
  for (const auto& r : band.reports) {
    INFO(render(r));
  }
  CHECK(band.pass);
}

TEST_CASE("gscpp sampler moments") {
  const GscppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), JumpLaw::discrete({0.1, 0.4, 0.3, 0.2})};
  const MomentTriple m = gscpp_moments(1.5, p);
  auto draw = [&](RandomStream& rng) { return gscpp_sample(1.5, p, rng); };
  CHECK_REPORT(mc_mean(draw, m.mean, testing::mc(83)));
  CHECK_REPORT(mc_variance(draw, m.variance, testing::mc(84)));
  RandomStream rng(2);
  CHECK(gscpp_sample(0.0, p, rng) == 0.0);
}

TEST_CASE("unit jump sampler has the counting law") {
  const GscppParams p{tempered_params(1.0, 0.6, 1.0, 1.0), JumpLaw::degenerate(1)};
  const auto pmf = gspp_pmf_generic_table(30, 1.0, p.gspp);
  const double tv = mc_pmf_tv(
      [&](RandomStream& rng) { return static_cast<std::uint64_t>(gscpp_sample(1.0, p, rng)); },
      pmf, testing::mc(85));
  CHECK(tv < 0.01);
}

TEST_CASE("jump law validation") {
  CHECK_THROWS_AS(JumpLaw::discrete({0.5, 0.6}), Error);
  CHECK_THROWS_AS(JumpLaw::discrete({-0.1, 1.1}), Error);
  CHECK_THROWS_AS(JumpLaw::grid(0.0, 0.0, {1.0}), Error);
  const JumpLaw b = JumpLaw::bernoulli(0.25);
  CHECK(b.moment1() == doctest::Approx(0.25));
  CHECK(b.variance() == doctest::Approx(0.1875));
  CHECK(b.cdf(0.5) == doctest::Approx(0.75));
}
