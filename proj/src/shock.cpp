#include "geocount/shock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "geocount/error.hpp"
#include "geocount/format.hpp"

namespace geocount {

void ExtremeShockModel::validate() const {
  if (!(q >= 0.0 && q <= 1.0)) throw_out_of_range("q must lie in [0, 1]");
  arrivals.validate();
}

void CumulativeShockModel::validate() const {
  if (threshold < 1) throw_out_of_range("threshold must be >= 1");
  shock_process.validate();
  damage_law.validate();
}

namespace {

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw_out_of_range(std::string(who) + ": t must be finite and >= 0");
  }
}

// c = 1 - e^{-f(lambda (1 - q))}
double shock_constant(const ExtremeShockModel& m) {
  const double f = laplace_exponent(m.arrivals.spp.sub, m.arrivals.spp.lambda * (1.0 - m.q));
  return -std::expm1(-f);
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace

double extreme_reliability(double t, const ExtremeShockModel& m) {
  m.validate();
  check_time(t, "extreme_reliability");
  return 1.0 / (1.0 + m.arrivals.gcp.mu * t * shock_constant(m));
}

double extreme_failure_rate(double t, const ExtremeShockModel& m) {
  m.validate();
  check_time(t, "extreme_failure_rate");
  const double c = shock_constant(m);
  const double mu = m.arrivals.gcp.mu;
  return mu * c / (1.0 + mu * t * c);
}

std::vector<McReport> extreme_mc(std::span<const double> t_grid, const ExtremeShockModel& m,
                                 const McOptions& opt) {
  m.validate();
  if (opt.n < 1000) throw_out_of_range("extreme_mc needs at least 1000 paths");
  std::vector<McReport> out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    check_time(t, "extreme_mc");
    McOptions o = opt;
    o.seed = point_seed(opt.seed, i);
    // The product of N Bernoulli(q) factors is 1 iff the run of survived
    // shocks, geometric with P[run >= n] = q^n, reaches N.
    auto survives = [&m, t](RandomStream& rng) {
      const std::uint64_t n = gspp_sample(t, m.arrivals, rng);
      if (n == 0 || m.q == 1.0) return true;
      if (m.q == 0.0) return false;
      std::geometric_distribution<std::uint64_t> run(1.0 - m.q);
      return run(rng.engine()) >= n;
    };
    out.push_back(mc_proportion(survives, extreme_reliability(t, m), o));
  }
  return out;
}

double cumulative_reliability(double t, const CumulativeShockModel& m, const SeriesControl& ctl) {
  m.validate();
  ctl.validate();
  check_time(t, "cumulative_reliability");
  const auto pmf = gspp_pmf_generic_table(m.threshold - 1, t, m.damage_process());
  CompensatedSum<double> s(ctl.kahan);
  for (double v : pmf) s.add(v);
  return std::min(1.0, s.value());
}

McReport cumulative_mc(double t, const CumulativeShockModel& m, const McOptions& opt) {
  m.validate();
  check_time(t, "cumulative_mc");
  const GsppParams damage = m.damage_process();
  auto below = [&](RandomStream& rng) { return gspp_sample(t, damage, rng) < m.threshold; };
  return mc_proportion(below, cumulative_reliability(t, m), opt);
}

McReport cumulative_mc_general(double t, std::uint64_t threshold, const GcpParams& shocks,
                               const JumpLaw& damage, const McOptions& opt) {
  check_time(t, "cumulative_mc_general");
  shocks.validate();
  if (threshold < 1) throw_out_of_range("threshold must be >= 1");
  if (damage.kind() != JumpKind::discrete) throw_invalid("damage law must be discrete");
  auto below = [&](RandomStream& rng) {
    const std::uint64_t g = gcp_sample_count(t, shocks, rng);
    return damage.sample_sum(g, rng) < static_cast<double>(threshold);
  };
  McReport r = mc_proportion(below, std::numeric_limits<double>::quiet_NaN(), opt);
  r.pass = true;  // nothing to compare against
  return r;
}

std::string_view sweep_parameter_name(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::q: return "q";
    case SweepParameter::alpha: return "alpha";
    case SweepParameter::lambda: return "lambda";
    case SweepParameter::mu: return "mu";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "q") return SweepParameter::q;
  if (name == "alpha") return SweepParameter::alpha;
  if (name == "lambda") return SweepParameter::lambda;
  if (name == "mu") return SweepParameter::mu;
  throw Error(ErrorCode::invalid_argument,
              "unknown sweep parameter '" + std::string(name) + "' (q, alpha, lambda, mu)");
}

std::string_view sweep_quantity_name(SweepQuantity q) noexcept {
  return q == SweepQuantity::reliability ? "reliability" : "failure_rate";
}

ExtremeShockModel with_parameter(const ExtremeShockModel& base, SweepParameter p, double value) {
  ExtremeShockModel m = base;
  switch (p) {
    case SweepParameter::q: m.q = value; break;
    case SweepParameter::lambda: m.arrivals.spp.lambda = value; break;
    case SweepParameter::mu: m.arrivals.gcp.mu = value; break;
    case SweepParameter::alpha:
      if (base.arrivals.spp.sub.get<StableFamily>()) {
        m.arrivals.spp.sub = SubordinatorSpec::stable(value);
      } else if (const auto* ts = base.arrivals.spp.sub.get<TemperedStableFamily>()) {
        m.arrivals.spp.sub = SubordinatorSpec::tempered_stable(value, ts->nu);
      } else {
        throw_invalid("alpha sweep needs a stable or tempered stable subordinator");
      }
      break;
  }
  m.validate();
  return m;
}

SweepTable sensitivity_sweep(const ExtremeShockModel& baseline, SweepParameter parameter,
                             std::span<const double> values, std::span<const double> t_grid,
                             SweepQuantity quantity, const std::optional<McOptions>& mc) {
  baseline.validate();
  if (mc && quantity != SweepQuantity::reliability) {
    throw_invalid("Monte Carlo columns are only defined for reliability sweeps");
  }
  SweepTable table{parameter, quantity, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const ExtremeShockModel m = with_parameter(baseline, parameter, values[i]);
    std::vector<McReport> reports;
    if (mc) {
      McOptions o = *mc;
      o.seed = point_seed(mc->seed, 1000 + i);
      reports = extreme_mc(t_grid, m, o);
    }
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      const double t = t_grid[j];
      SweepRow row{values[i], t,
                   quantity == SweepQuantity::reliability ? extreme_reliability(t, m)
                                                          : extreme_failure_rate(t, m),
                   std::nullopt, std::nullopt};
      if (mc) {
        row.mc_estimate = reports[j].estimate;
        row.mc_stderr = reports[j].std_error;
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

bool sweep_is_ordered(const SweepTable& table, int direction) {
  std::map<double, std::vector<std::pair<double, double>>> by_t;
  for (const auto& r : table.rows) by_t[r.t].push_back({r.parameter_value, r.value});
  for (auto& [t, curve] : by_t) {
    std::sort(curve.begin(), curve.end());
    for (std::size_t i = 1; i < curve.size(); ++i) {
      const double diff = curve[i].second - curve[i - 1].second;
      if (direction * diff < -1e-14) return false;
    }
  }
  return true;
}

int expected_direction(SweepParameter p, SweepQuantity q) noexcept {
  const int reliability = (p == SweepParameter::q || p == SweepParameter::alpha) ? 1 : -1;
  return q == SweepQuantity::reliability ? reliability : -reliability;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  const bool with_mc = std::any_of(table.rows.begin(), table.rows.end(),
                                   [](const SweepRow& r) { return r.mc_estimate.has_value(); });
  os << "parameter_name,parameter_value,t," << sweep_quantity_name(table.quantity);
  if (with_mc) os << ",mc_estimate,mc_stderr";
  os << '\n';
  const auto name = sweep_parameter_name(table.parameter);
  for (const auto& r : table.rows) {
    os << name << ',' << format_double(r.parameter_value) << ',' << format_double(r.t) << ','
       << format_double(r.value);
    if (with_mc) {
      os << ',' << (r.mc_estimate ? format_double(*r.mc_estimate) : "")
         << ',' << (r.mc_stderr ? format_double(*r.mc_stderr) : "");
    }
    os << '\n';
  }
}

}  // namespace geocount
