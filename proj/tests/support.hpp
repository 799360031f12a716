#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "geocount/mc.hpp"

namespace testing {

inline geocount::McOptions mc(std::uint64_t seed, std::size_t n = 100'000) {
  geocount::McOptions o;
  o.n = n;
  o.seed = seed;
  return o;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace testing

#define CHECK_REPORT(r)         \
  do {                          \
    const auto& rep_ = (r);     \
    INFO(geocount::render(rep_)); \
    CHECK(rep_.pass);           \
  } while (0)
