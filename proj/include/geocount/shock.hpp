#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geocount/gspp.hpp"
#include "geocount/jump_law.hpp"
#include "geocount/mc.hpp"

namespace geocount {

/// Each GSPP shock is survived independently with probability q.
struct ExtremeShockModel {
  double q;
  GsppParams arrivals;

  void validate() const;
};

/// Damage Z(t) = sum of W_i over G(t) shocks, W_i iid N^f(1); the system
/// fails once Z(t) >= threshold.
struct CumulativeShockModel {
  std::uint64_t threshold;
  GcpParams shock_process;
  SppParams damage_law;

  void validate() const;
  GsppParams damage_process() const { return {damage_law, shock_process}; }
};

/// R(t) = 1 / (1 + mu t (1 - e^{-f(lambda (1 - q))})).
double extreme_reliability(double t, const ExtremeShockModel& m);
/// r(t) = mu c / (1 + mu t c), c = 1 - e^{-f(lambda (1 - q))}.
double extreme_failure_rate(double t, const ExtremeShockModel& m);

/// Survival fractions of the two-state product construction, one report per
/// grid point. Point i uses the stream family derived from (seed, i).
std::vector<McReport> extreme_mc(std::span<const double> t_grid, const ExtremeShockModel& m,
                                 const McOptions& opt);

double cumulative_reliability(double t, const CumulativeShockModel& m,
                              const SeriesControl& ctl = {});
McReport cumulative_mc(double t, const CumulativeShockModel& m, const McOptions& opt);

/// Monte Carlo only: integer damage per shock drawn from an arbitrary
/// discrete law. No closed form; the report's target is NaN.
McReport cumulative_mc_general(double t, std::uint64_t threshold, const GcpParams& shocks,
                               const JumpLaw& damage, const McOptions& opt);

enum class SweepParameter { q, alpha, lambda, mu };
enum class SweepQuantity { reliability, failure_rate };

std::string_view sweep_parameter_name(SweepParameter p) noexcept;
SweepParameter parse_sweep_parameter(std::string_view name);
std::string_view sweep_quantity_name(SweepQuantity q) noexcept;

struct SweepRow {
  double parameter_value;
  double t;
  double value;
  std::optional<double> mc_estimate;
  std::optional<double> mc_stderr;
};

struct SweepTable {
  SweepParameter parameter;
  SweepQuantity quantity;
  std::vector<SweepRow> rows;  // value-major, then t
};

/// Baseline model with one parameter replaced. `alpha` needs a stable or
/// tempered stable subordinator.
ExtremeShockModel with_parameter(const ExtremeShockModel& base, SweepParameter p, double value);

/// One curve per parameter value over t_grid; optional Monte Carlo columns
/// (reliability only).
SweepTable sensitivity_sweep(const ExtremeShockModel& baseline, SweepParameter parameter,
                             std::span<const double> values, std::span<const double> t_grid,
                             SweepQuantity quantity = SweepQuantity::reliability,
                             const std::optional<McOptions>& mc = std::nullopt);

/// Checks that the curves are pointwise ordered as the parameter grows:
/// +1 for increasing, -1 for decreasing.
bool sweep_is_ordered(const SweepTable& table, int direction);

/// Expected direction of the curves for the stated sensitivity findings.
int expected_direction(SweepParameter p, SweepQuantity q) noexcept;

/// CSV with header parameter_name,parameter_value,t,<quantity>[,mc_estimate,mc_stderr].
void write_sweep_csv(std::ostream& os, const SweepTable& table);

}  // namespace geocount
