#include <cmath>
#include <vector>

#include "doctest.h"
#include "geocount/error.hpp"
#include "geocount/spp.hpp"
#include "support.hpp"

using namespace geocount;

TEST_CASE("generic pmf at k = 0") {
  for (const auto& spec : {SubordinatorSpec::stable(0.6), SubordinatorSpec::gamma(2.0, 0.5),
                           SubordinatorSpec::inverse_gaussian(1.0, 2.0)}) {
    const SppParams p{1.4, spec};
    CHECK(spp_pmf_generic(0, 0.8, p) ==
          doctest::Approx(std::exp(-0.8 * laplace_exponent(spec, 1.4))).epsilon(1e-14));
  }
}

TEST_CASE("generic pmf against the stable series") {
  const SppParams p{0.5, SubordinatorSpec::stable(0.7)};
  const auto table = spp_pmf_generic_table(15, 1.0, p);
  for (std::uint64_t k = 0; k <= 15; ++k) {
    CAPTURE(k);
    CHECK(std::abs(table[k] - spp_pmf_sfpp(k, 1.0, 0.5, 0.7)) < 1e-8);
    CHECK(std::abs(spp_pmf_generic(k, 1.0, p) - table[k]) < 1e-14);
  }
}

TEST_CASE("gamma family normalization") {
  const SppParams p{1.0, SubordinatorSpec::gamma(2.0, 1.0)};
  const Pmf pmf = spp_pmf_adaptive(1.0, p);
  CHECK(pmf.converged);
  CHECK(pmf.stored_mass() <= 1.0 + 1e-12);
  CHECK(pmf.stored_mass() >= 1.0 - 1e-6);
}

TEST_CASE("stable family normalization uses the branch-point tail") {
  const SppParams p{1.0, SubordinatorSpec::stable(0.5)};
  const Pmf pmf = spp_pmf_adaptive(1.0, p);
  CHECK(pmf.tail_method == TailMethod::algebraic_asymptotic);
  CHECK(pmf.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stable series trivial values") {
  CHECK(spp_pmf_sfpp(0, 0.0, 0.8, 0.4) == 1.0);
  CHECK(spp_pmf_sfpp(3, 0.0, 0.8, 0.4) == 0.0);
  CHECK(spp_pmf_sfpp(0, 1.7, 0.8, 0.4) ==
        doctest::Approx(std::exp(-std::pow(0.8, 0.4) * 1.7)).epsilon(1e-13));
  const SeriesValue v = spp_pmf_sfpp_series(4, 1.0, 1.0, 0.5);
  CHECK(v.diagnostic.converged);
  CHECK(v.diagnostic.terms > 0);
}

TEST_CASE("stable series near alpha = 1 approaches the poisson pmf") {
  double fact = 1.0;
  for (int k = 0; k <= 10; ++k) {
    if (k > 0) fact *= k;
    CHECK(std::abs(spp_pmf_sfpp(k, 1.0, 1.0, 0.999) - std::exp(-1.0) / fact) < 1e-2);
  }
}

TEST_CASE("tempered series with nu = 0 is the stable series") {
  for (std::uint64_t k = 0; k <= 10; ++k) {
    CHECK(std::abs(spp_pmf_tsfpp(k, 1.0, 1.0, 0.6, 0.0) - spp_pmf_sfpp(k, 1.0, 1.0, 0.6)) <
          1e-10);
  }
}

TEST_CASE("tempered series trivial values and cross check") {
  CHECK(spp_pmf_tsfpp(0, 0.0, 1.0, 0.6, 1.0) == 1.0);
  const SppParams p{1.0, SubordinatorSpec::tempered_stable(0.6, 1.0)};
  const auto table = spp_pmf_generic_table(12, 1.0, p);
  for (std::uint64_t k = 0; k <= 12; ++k) {
    CAPTURE(k);
    CHECK(std::abs(spp_pmf_tsfpp(k, 1.0, 1.0, 0.6, 1.0) - table[k]) < 1e-8);
  }
}

TEST_CASE("series parameter checks") {
  CHECK_THROWS_AS(spp_pmf_sfpp(1, 1.0, 1.0, 1.2), Error);
  CHECK_THROWS_AS(spp_pmf_sfpp(1, -1.0, 1.0, 0.5), Error);
  CHECK_THROWS_AS(spp_pmf_tsfpp(1, 1.0, 1.0, 0.5, -0.1), Error);
}

TEST_CASE("series precision guard") {
  // The alternating terms peak near e^{lambda^alpha t}; at this size the
  // cancellation exceeds binary128 and the evaluator must say so.
  SeriesControl ctl;
  ctl.max_terms = 100'000;
  CHECK_THROWS_AS(spp_pmf_sfpp(2, 200.0, 2.0, 0.9, ctl), ConvergenceError);
}

TEST_CASE("spp moments") {
  const auto ts = spp_moments(1.0, {1.0, SubordinatorSpec::tempered_stable(0.6, 1.0)});
  CHECK(ts.mean == doctest::Approx(0.6));
  CHECK(ts.variance == doctest::Approx(0.84));
  const auto z = spp_moments(0.0, {1.0, SubordinatorSpec::tempered_stable(0.6, 1.0)});
  CHECK(z.mean == 0.0);
  CHECK(z.variance == 0.0);
  const auto g = spp_moments(1.0, {2.0, SubordinatorSpec::gamma(1.0, 1.0)});
  CHECK(g.mean == doctest::Approx(2.0));
  CHECK(g.variance == doctest::Approx(6.0));
  CHECK(std::isinf(spp_moments(1.0, {1.0, SubordinatorSpec::stable(0.5)}).mean));
}

TEST_CASE("spp sampler mean") {
  const SppParams p{1.0, SubordinatorSpec::tempered_stable(0.6, 1.0)};
  const auto r = mc_mean(
      [&](RandomStream& rng) { return static_cast<double>(spp_sample(1.0, p, rng)); }, 0.6,
      testing::mc(61));
  CHECK_REPORT(r);
}

TEST_CASE("spp sampler law") {
  std::vector<double> pmf;
  for (std::uint64_t k = 0; k <= 20; ++k) pmf.push_back(spp_pmf_tsfpp(k, 1.0, 1.0, 0.6, 1.0));
  const SppParams p{1.0, SubordinatorSpec::tempered_stable(0.6, 1.0)};
  const double tv =
      mc_pmf_tv([&](RandomStream& rng) { return spp_sample(1.0, p, rng); }, pmf, testing::mc(62));
  CHECK(tv < 0.01);
}

TEST_CASE("spp sampler at t = 0") {
  RandomStream rng(3);
  const SppParams p{1.0, SubordinatorSpec::stable(0.5)};
  for (int i = 0; i < 100; ++i) CHECK(spp_sample(0.0, p, rng) == 0);
}
