#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace geocount::cli {

/// Fully resolved run configuration. Precedence when building it:
/// built-in defaults < JSON config file < GEOCOUNT_* environment < flags.
struct RunConfig {
  std::string command;
  std::string process = "gspp";
  nlohmann::json subordinator = {{"family", "stable"}, {"alpha", 0.6}};
  double lambda = 1.0;
  double mu = 1.0;
  std::vector<double> t;
  std::uint64_t k_max = 10;
  double q = 0.7;
  std::uint64_t threshold = 0;  // 0 selects the extreme shock model
  nlohmann::json jumps;         // inline jump law or null
  nlohmann::json factors;       // inline factor law or null
  std::uint64_t seed = 1;
  std::uint64_t n = 100'000;
  std::uint64_t threads = 0;
  std::string out;
  std::string format = "csv";
  double tol = 1e-12;
  std::uint64_t max_terms = 10'000;
  std::string parameter = "q";
  std::vector<double> values;
  std::string quantity = "reliability";
  bool mc = false;
  std::vector<double> y;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

/// Runs one CLI invocation. Results go to `out` (or the --out file),
/// machine-readable errors to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geocount::cli
