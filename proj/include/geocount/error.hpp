#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geocount {

/// Stable error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  invalid_argument = 2,
  unknown_family = 3,
  parameter_out_of_range = 4,
  region_violation = 5,
  convergence = 6,
  sampler_degeneracy = 7,
  io = 8,
  unsupported = 9,
  overflow = 10,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown when a series leaves its validity region (closed forms that only
/// hold for some parameter combinations).
class RegionError : public Error {
 public:
  explicit RegionError(const std::string& message)
      : Error(ErrorCode::region_violation, message) {}
};

/// Series truncation or precision failure. Carries the partial sum and the
/// tail estimate at the point the evaluator gave up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double partial_sum,
                   double tail_estimate)
      : Error(ErrorCode::convergence, message),
        partial_sum_(partial_sum),
        tail_estimate_(tail_estimate) {}

  double partial_sum() const noexcept { return partial_sum_; }
  double tail_estimate() const noexcept { return tail_estimate_; }

 private:
  double partial_sum_;
  double tail_estimate_;
};

[[noreturn]] void throw_out_of_range(const std::string& what);
[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace geocount
