#include <cmath>
#include <vector>

#include "doctest.h"
#include "geocount/mc.hpp"
#include "support.hpp"

using namespace geocount;

TEST_CASE("constant sampler") {
  const McReport r = mc_mean([](RandomStream&) { return 2.5; }, 2.5, testing::mc(1, 1000));
  CHECK(r.pass);
  CHECK(r.std_error == 0.0);
  CHECK(r.estimate == 2.5);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("degenerate sampler is flagged") {
  const McReport r = mc_mean([](RandomStream&) { return 1.0; }, 1.0, testing::mc(1, 1000), 2.0);
  CHECK(r.degenerate);
}

TEST_CASE("fair coin total variation") {
  const std::vector<double> pmf = {0.5, 0.5};
  const double tv = mc_pmf_tv(
      [](RandomStream& rng) { return static_cast<std::uint64_t>(rng.uniform_open() < 0.5); }, pmf,
      testing::mc(2));
  CHECK(tv < 0.01);
  const std::vector<double> wrong = {0.3, 0.7};
  CHECK(mc_pmf_tv(
            [](RandomStream& rng) { return static_cast<std::uint64_t>(rng.uniform_open() < 0.5); },
            wrong, testing::mc(2)) > 0.15);
}

TEST_CASE("tail mass is lumped") {
  const std::vector<double> pmf = {0.5};
  const double tv = mc_pmf_tv(
      [](RandomStream& rng) { return static_cast<std::uint64_t>(rng.uniform_open() < 0.5 ? 0 : 7); },
      pmf, testing::mc(3));
  CHECK(tv < 0.01);
}

TEST_CASE("wrong target fails") {
  auto draw = [](RandomStream& rng) { return rng.normal(); };
  const McReport ok = mc_mean(draw, 0.0, testing::mc(4));
  CHECK(ok.pass);
  const McReport bad = mc_mean(draw, 10.0 * ok.std_error, testing::mc(4));
  CHECK_FALSE(bad.pass);
  CHECK(mc_verdict(1.0, 0.1, 1.29, 3.0));
  CHECK_FALSE(mc_verdict(1.0, 0.1, 1.31, 3.0));
  CHECK(mc_verdict(1.0, 0.0, 1.0, 3.0));
  CHECK_FALSE(mc_verdict(1.0, 0.0, 1.0 + 1e-9, 3.0));
}

TEST_CASE("variance and proportion") {
  CHECK_REPORT(mc_variance([](RandomStream& rng) { return 2.0 * rng.normal(); }, 4.0, testing::mc(5)));
  CHECK_REPORT(mc_proportion([](RandomStream& rng) { return rng.uniform_open() < 0.3; }, 0.3,
                             testing::mc(6)));
  CHECK_REPORT(mc_laplace([](RandomStream& rng) { return rng.exponential(); }, 1.0, 0.5,
                          testing::mc(7)));
}

TEST_CASE("cdf band") {
  const std::vector<double> levels = {0.1, 0.25, 0.5, 0.75, 0.9};
  const BandResult ok = mc_cdf_band([](RandomStream& rng) { return rng.exponential(); },
                                    [](double y) { return y > 0 ? 1.0 - std::exp(-y) : 0.0; },
                                    levels, testing::mc(8));
  CHECK(ok.pass);
  CHECK(ok.points.size() == levels.size());
  const BandResult bad = mc_cdf_band([](RandomStream& rng) { return rng.exponential(); },
                                     [](double y) { return y > 0 ? 1.0 - std::exp(-2 * y) : 0.0; },
                                     levels, testing::mc(8));
  CHECK_FALSE(bad.pass);
}

TEST_CASE("reports do not depend on the thread count") {
  auto draw = [](RandomStream& rng) { return rng.exponential() + rng.normal(); };
  McOptions a = testing::mc(9);
  a.threads = 1;
  McOptions b = testing::mc(9);
  b.threads = 7;
  const McReport ra = mc_mean(draw, 1.0, a);
  const McReport rb = mc_mean(draw, 1.0, b);
  CHECK(ra.estimate == rb.estimate);
  CHECK(ra.std_error == rb.std_error);
  const McReport va = mc_variance(draw, 2.0, a);
  const McReport vb = mc_variance(draw, 2.0, b);
  CHECK(va.estimate == vb.estimate);
  CHECK(render(ra) == render(rb));
}

TEST_CASE("sample size guard") {
  CHECK_THROWS(mc_mean([](RandomStream&) { return 0.0; }, 0.0, testing::mc(1, 10)));
}

TEST_CASE("derived streams differ") {
  RandomStream a = RandomStream::derive(1, 0);
  RandomStream b = RandomStream::derive(1, 1);
  RandomStream c = RandomStream::derive(1, 0);
  const auto x = a.engine()();
  CHECK(x != b.engine()());
  CHECK(x == c.engine()());
}
