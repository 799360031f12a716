#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "geocount/error.hpp"
#include "geocount/format.hpp"
#include "geocount/gsmpp.hpp"
#include "geocount/json_io.hpp"
#include "geocount/mc.hpp"
#include "geocount/shock.hpp"

namespace geocount::cli {

using nlohmann::json;

namespace {

enum class FlagType { number, integer, text, list, json_file, boolean, sub_number, sub_text };

struct Flag {
  const char* name;
  const char* key;
  FlagType type;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"process", "process", FlagType::text, "gcp | spp | gspp | gscpp | gsmpp"},
    {"family", "family", FlagType::sub_text,
     "stable | tempered_stable | gamma | inverse_gaussian (mixtures via --config)"},
    {"alpha", "alpha", FlagType::sub_number, "stability index"},
    {"nu", "nu", FlagType::sub_number, "tempering parameter"},
    {"shape", "shape", FlagType::sub_number, "gamma shape p"},
    {"rate", "rate", FlagType::sub_number, "gamma rate beta"},
    {"delta", "delta", FlagType::sub_number, "inverse Gaussian delta"},
    {"gamma", "gamma", FlagType::sub_number, "inverse Gaussian gamma"},
    {"lambda", "lambda", FlagType::number, "Poisson rate"},
    {"mu", "mu", FlagType::number, "geometric counting intensity"},
    {"t", "t", FlagType::list, "time or comma list"},
    {"t-grid", "t", FlagType::list, "comma list or start:stop:step"},
    {"k-max", "k_max", FlagType::integer, "largest count"},
    {"q", "q", FlagType::number, "per-shock survival probability"},
    {"threshold", "threshold", FlagType::integer, "damage threshold (cumulative model)"},
    {"jumps", "jumps", FlagType::json_file, "jump law JSON file"},
    {"factors", "factors", FlagType::json_file, "factor law JSON file"},
    {"seed", "seed", FlagType::integer, "master seed"},
    {"n", "n", FlagType::integer, "Monte Carlo sample size"},
    {"threads", "threads", FlagType::integer, "worker threads (0: all cores)"},
    {"out", "out", FlagType::text, "output path (config echoed to <out>.config.json)"},
    {"format", "format", FlagType::text, "csv | json"},
    {"tol", "tol", FlagType::number, "series absolute tolerance"},
    {"max-terms", "max_terms", FlagType::integer, "series term cap"},
    {"parameter", "parameter", FlagType::text, "sweep parameter: q | alpha | lambda | mu"},
    {"values", "values", FlagType::list, "sweep values"},
    {"quantity", "quantity", FlagType::text, "reliability | failure_rate"},
    {"mc", "mc", FlagType::boolean, "add Monte Carlo columns"},
    {"y", "y", FlagType::list, "cdf evaluation points"},
};

[[noreturn]] void bad_value(const std::string& what, const std::string& text) {
  throw Error(ErrorCode::invalid_argument, what + ": cannot parse '" + text + "'");
}

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && *b == ' ') ++b;
  if (b < e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) bad_value(what, text);
  return v;
}

std::uint64_t parse_integer(const std::string& text, const std::string& what) {
  const double v = parse_number(text, what);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) bad_value(what, text);
  return static_cast<std::uint64_t>(v);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    const double start = parse_number(text.substr(0, a), what);
    const double stop = parse_number(text.substr(a + 1, b - a - 1), what);
    const double step = parse_number(text.substr(b + 1), what);
    if (!(step > 0.0) || stop < start) bad_value(what, text);
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) bad_value(what, text);
  return out;
}

bool parse_bool(const std::string& text, const std::string& what) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(what, text);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_argument, "invalid JSON in '" + path + "': " + e.what());
  }
}

// Applies one textual flag value to a JSON patch.
void apply_flag(json& patch, const Flag& f, const std::string& text, const std::string& origin) {
  const std::string what = origin;
  switch (f.type) {
    case FlagType::number: patch[f.key] = parse_number(text, what); break;
    case FlagType::integer: patch[f.key] = parse_integer(text, what); break;
    case FlagType::text: patch[f.key] = text; break;
    case FlagType::list: patch[f.key] = parse_list(text, what); break;
    case FlagType::json_file: patch[f.key] = read_json_file(text); break;
    case FlagType::boolean: patch[f.key] = parse_bool(text, what); break;
    case FlagType::sub_number: patch["subordinator"][f.key] = parse_number(text, what); break;
    case FlagType::sub_text: patch["subordinator"][f.key] = text; break;
  }
}

std::string env_name(const char* flag) {
  std::string s = "GEOCOUNT_";
  for (const char* c = flag; *c; ++c) {
    s += *c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
  }
  return s;
}

void merge(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.key() == "subordinator" && base.contains("subordinator") && it->is_object()) {
      json& sub = base["subordinator"];
      // A different family starts from a clean parameter set.
      if (it->contains("family") && sub.value("family", "") != (*it)["family"]) sub = json::object();
      sub.update(*it);
    } else {
      base[it.key()] = *it;
    }
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::invalid_argument, std::string("config field '") + key +
                                                 "' has the wrong type");
  }
}

std::vector<double> list_or(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get_or<std::vector<double>>(j, key, {});
}

// ---------------------------------------------------------------- output

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::vector<std::string> warnings;
  json extra = json::object();
};

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return format_double(v.get<double>());
  return v.get<std::string>();
}

json number_cell(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

void write_table(std::ostream& os, const Table& table, const std::string& format,
                 const std::string& command) {
  if (format == "json") {
    json doc = {{"command", command}, {"columns", table.columns}, {"rows", json::array()}};
    for (const auto& row : table.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
      doc["rows"].push_back(obj);
    }
    if (!table.warnings.empty()) doc["warnings"] = table.warnings;
    doc.update(table.extra);
    os << doc.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
}

// ---------------------------------------------------------------- model

struct Model {
  const RunConfig& cfg;
  SubordinatorSpec spec;
  SeriesControl ctl;

  explicit Model(const RunConfig& c)
      : cfg(c), spec(subordinator_from_json(c.subordinator)), ctl{c.tol, c.max_terms, true} {
    ctl.validate();
  }

  SppParams spp() const { return {cfg.lambda, spec}; }
  GcpParams gcp() const { return {cfg.mu}; }
  GsppParams gspp() const { return {spp(), gcp()}; }

  JumpLaw jumps() const {
    if (cfg.jumps.is_null()) throw_invalid("process gscpp needs a jump law (--jumps <file>)");
    return jump_law_from_json(cfg.jumps);
  }
  FactorLaw factors() const {
    if (cfg.factors.is_null()) throw_invalid("process gsmpp needs a factor law (--factors <file>)");
    return factor_law_from_json(cfg.factors);
  }
  GscppParams gscpp() const { return {gspp(), jumps()}; }
  GsmppParams gsmpp() const { return {gspp(), factors()}; }

  McOptions mc(std::uint64_t salt = 0) const {
    McOptions o;
    o.n = cfg.n;
    o.seed = salt ? splitmix64(cfg.seed + salt) : cfg.seed;
    o.threads = cfg.threads;
    return o;
  }

  std::vector<double> times(std::vector<double> fallback) const {
    return cfg.t.empty() ? fallback : cfg.t;
  }
};

void check_process(const std::string& p) {
  static const char* known[] = {"gcp", "spp", "gspp", "gscpp", "gsmpp"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return p == k; }) ==
      std::end(known)) {
    throw Error(ErrorCode::invalid_argument,
                "unknown process '" + p + "' (gcp, spp, gspp, gscpp, gsmpp)");
  }
}

// Cross-check column: difference between the jet value and a closed-form
// series, when one applies.
std::string series_diagnostic(const std::function<double()>& series, double jet) {
  try {
    return "jet;series_diff=" + format_double(jet - series());
  } catch (const Error& e) {
    return std::string("jet;series_unavailable=") + std::string(error_code_name(e.code()));
  }
}

Table cmd_pmf(const Model& m) {
  const auto& cfg = m.cfg;
  Table table;
  const auto ts = m.times({1.0});
  const bool cdf_mode =
      cfg.process == "gsmpp" ||
      (cfg.process == "gscpp" && m.jumps().kind() == JumpKind::grid);
  if (cdf_mode) {
    if (cfg.y.empty()) throw_invalid("cdf output needs evaluation points (--y)");
    table.columns = {"t", "y", "cdf", "diagnostic"};
    for (double t : ts) {
      for (double y : cfg.y) {
        const CompoundCdf r = cfg.process == "gsmpp" ? gsmpp_cdf(y, t, m.gsmpp(), m.ctl)
                                                     : gscpp_cdf(y, t, m.gscpp(), m.ctl);
        std::string diag = std::string(r.converged ? "converged" : "truncated") +
                           ";terms=" + std::to_string(r.terms) +
                           ";bound=" + format_double(r.truncation_bound);
        table.rows.push_back({t, y, r.value, diag});
        for (const auto& w : r.warnings) {
          if (std::find(table.warnings.begin(), table.warnings.end(), w) == table.warnings.end()) {
            table.warnings.push_back(w);
          }
        }
      }
    }
    return table;
  }
  table.columns = {"t", "k", "pmf", "diagnostic"};
  const auto* stable = m.spec.get<StableFamily>();
  const auto* tempered = m.spec.get<TemperedStableFamily>();
  for (double t : ts) {
    std::vector<double> values;
    if (cfg.process == "gcp") {
      for (std::uint64_t k = 0; k <= cfg.k_max; ++k) values.push_back(gcp_pmf(k, t, m.gcp()));
    } else if (cfg.process == "spp") {
      values = spp_pmf_generic_table(cfg.k_max, t, m.spp());
    } else if (cfg.process == "gspp") {
      values = gspp_pmf_generic_table(cfg.k_max, t, m.gspp());
    } else {
      const auto p = m.gscpp();
      for (std::uint64_t k = 0; k <= cfg.k_max; ++k) {
        values.push_back(gscpp_pmf_discrete(k, t, p, m.ctl));
      }
    }
    for (std::uint64_t k = 0; k <= cfg.k_max; ++k) {
      std::string diag = "closed_form";
      const double v = values[k];
      if (cfg.process == "spp") {
        diag = "jet";
        if (stable) {
          diag = series_diagnostic([&] { return spp_pmf_sfpp(k, t, cfg.lambda, stable->alpha, m.ctl); }, v);
        } else if (tempered) {
          diag = series_diagnostic(
              [&] { return spp_pmf_tsfpp(k, t, cfg.lambda, tempered->alpha, tempered->nu, m.ctl); }, v);
        }
      } else if (cfg.process == "gspp") {
        diag = "jet";
        if (stable) {
          diag = series_diagnostic(
              [&] { return gspp_pmf_sfpp(k, t, cfg.lambda, stable->alpha, cfg.mu, m.ctl); }, v);
        } else if (tempered) {
          diag = series_diagnostic([&] {
            return gspp_pmf_tsfpp(k, t, cfg.lambda, tempered->alpha, tempered->nu, cfg.mu, m.ctl);
          }, v);
        }
      } else if (cfg.process == "gscpp") {
        diag = "derivative";
      }
      table.rows.push_back({t, k, v, diag});
    }
  }
  return table;
}

struct MomentView {
  double mean;
  double variance;
  std::function<double(double, double)> cov;
};

MomentView moments_at(const Model& m, double t, std::vector<std::string>& warnings) {
  const auto& p = m.cfg.process;
  if (p == "gcp") {
    const auto g = m.gcp();
    const auto mv = gcp_moments(t, g);
    return {mv.mean, mv.variance, [g](double s, double u) {
              return gcp_cov(std::min(s, u), std::max(s, u), g);
            }};
  }
  if (p == "spp") {
    const auto sp = m.spp();
    const auto mv = spp_moments(t, sp);
    // Independent increments: the covariance is the variance at min(s, t).
    return {mv.mean, mv.variance,
            [sp](double s, double u) { return spp_moments(std::min(s, u), sp).variance; }};
  }
  if (p == "gspp" || p == "gscpp") {
    const MomentTriple mt = p == "gspp" ? gspp_moments(t, m.gspp()) : gscpp_moments(t, m.gscpp());
    return {mt.mean, mt.variance, mt.cov};
  }
  const auto gp = m.gsmpp();
  const double mean = gsmpp_mean(t, gp, m.ctl);
  double variance = std::numeric_limits<double>::quiet_NaN();
  try {
    variance = gsmpp_mellin(3.0, t, gp, m.ctl) - mean * mean;
  } catch (const ConvergenceError& e) {
    const std::string w = "gsmpp variance unavailable: " + std::string(e.what());
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
  return {mean, variance,
          [](double, double) { return std::numeric_limits<double>::quiet_NaN(); }};
}

Table cmd_moments(const Model& m) {
  Table table;
  table.columns = {"s", "t", "mean", "variance", "covariance"};
  auto ts = m.times({1.0});
  std::sort(ts.begin(), ts.end());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const MomentView mv = moments_at(m, ts[j], table.warnings);
    for (std::size_t i = 0; i <= j; ++i) {
      table.rows.push_back({number_cell(ts[i]), number_cell(ts[j]), number_cell(mv.mean),
                            number_cell(mv.variance), number_cell(mv.cov(ts[i], ts[j]))});
    }
  }
  return table;
}

std::function<double(RandomStream&)> process_sampler(const Model& m, double t) {
  const auto& p = m.cfg.process;
  if (p == "gcp") {
    const auto g = m.gcp();
    return [g, t](RandomStream& rng) { return static_cast<double>(gcp_sample_count(t, g, rng)); };
  }
  if (p == "spp") {
    const auto sp = m.spp();
    return [sp, t](RandomStream& rng) { return static_cast<double>(spp_sample(t, sp, rng)); };
  }
  if (p == "gspp") {
    const auto gp = m.gspp();
    return [gp, t](RandomStream& rng) { return static_cast<double>(gspp_sample(t, gp, rng)); };
  }
  if (p == "gscpp") {
    const auto cp = m.gscpp();
    return [cp, t](RandomStream& rng) { return gscpp_sample(t, cp, rng); };
  }
  const auto mp = m.gsmpp();
  return [mp, t](RandomStream& rng) { return gsmpp_sample(t, mp, rng); };
}

// Returns the samples table; the summary goes to `summary`.
Table cmd_simulate(const Model& m, json& summary) {
  Table table;
  table.columns = {"t", "sample"};
  summary = {{"command", "simulate"}, {"process", m.cfg.process}, {"results", json::array()}};
  std::vector<std::string> warnings;
  const auto ts = m.times({1.0});
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const auto sampler = process_sampler(m, t);
    const McOptions o = m.mc(i + 1);
    auto chunks = detail::run_chunks<std::vector<double>>(
        o.n, o.seed, o.threads, [&](std::size_t count, RandomStream& rng) {
          std::vector<double> v(count);
          for (auto& x : v) x = sampler(rng);
          return v;
        });
    CompensatedSum<double> s1;
    for (const auto& c : chunks) {
      for (double x : c) {
        s1.add(x);
        if (!m.cfg.out.empty()) table.rows.push_back({t, x});
      }
    }
    const double n = static_cast<double>(o.n);
    const double mean = s1.value() / n;
    CompensatedSum<double> s2;
    for (const auto& c : chunks) {
      for (double x : c) s2.add((x - mean) * (x - mean));
    }
    const double var = s2.value() / (n - 1.0);
    const MomentView target = moments_at(m, t, warnings);
    const double se = std::sqrt(var / n);
    json r = {{"t", t},
              {"n", o.n},
              {"mean", mean},
              {"variance", var},
              {"std_error", se},
              {"target_mean", number_cell(target.mean)},
              {"target_variance", number_cell(target.variance)}};
    if (std::isfinite(target.mean)) r["pass"] = mc_verdict(mean, se, target.mean, o.k_se);
    summary["results"].push_back(r);
  }
  if (!warnings.empty()) summary["warnings"] = warnings;
  return table;
}

ExtremeShockModel extreme_model(const Model& m) { return {m.cfg.q, m.gspp()}; }

Table cmd_reliability(const Model& m) {
  Table table;
  const auto ts = m.times({0.0, 0.5, 1.0, 2.0, 4.0});
  if (m.cfg.threshold == 0) {
    const auto model = extreme_model(m);
    table.columns = {"t", "reliability", "failure_rate"};
    std::vector<McReport> reports;
    if (m.cfg.mc) {
      table.columns.insert(table.columns.end(), {"mc_estimate", "mc_stderr"});
      reports = extreme_mc(ts, model, m.mc());
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::vector<json> row = {ts[i], extreme_reliability(ts[i], model),
                               extreme_failure_rate(ts[i], model)};
      if (m.cfg.mc) {
        row.push_back(reports[i].estimate);
        row.push_back(reports[i].std_error);
      }
      table.rows.push_back(row);
    }
    return table;
  }
  const CumulativeShockModel model{m.cfg.threshold, m.gcp(), m.spp()};
  table.columns = {"t", "reliability"};
  if (m.cfg.mc) table.columns.insert(table.columns.end(), {"mc_estimate", "mc_stderr"});
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<json> row = {ts[i], cumulative_reliability(ts[i], model, m.ctl)};
    if (m.cfg.mc) {
      const McReport r = cumulative_mc(ts[i], model, m.mc(i + 1));
      row.push_back(r.estimate);
      row.push_back(r.std_error);
    }
    table.rows.push_back(row);
  }
  return table;
}

std::vector<double> default_sweep_values(SweepParameter p) {
  switch (p) {
    case SweepParameter::q: return {0.5, 0.7, 0.9};
    case SweepParameter::alpha: return {0.4, 0.6, 0.8};
    case SweepParameter::lambda: return {0.5, 1.0, 2.0};
    case SweepParameter::mu: return {0.5, 1.0, 2.0};
  }
  return {};
}

SweepQuantity parse_quantity(const std::string& q) {
  if (q == "reliability") return SweepQuantity::reliability;
  if (q == "failure_rate") return SweepQuantity::failure_rate;
  throw Error(ErrorCode::invalid_argument,
              "unknown quantity '" + q + "' (reliability, failure_rate)");
}

SweepTable run_sweep(const Model& m) {
  const SweepParameter p = parse_sweep_parameter(m.cfg.parameter);
  const SweepQuantity q = parse_quantity(m.cfg.quantity);
  const auto values = m.cfg.values.empty() ? default_sweep_values(p) : m.cfg.values;
  std::vector<double> ts = m.times({});
  if (ts.empty()) {
    for (int i = 0; i <= 20; ++i) ts.push_back(0.5 * i);
  }
  std::optional<McOptions> mc;
  if (m.cfg.mc) mc = m.mc();
  return sensitivity_sweep(extreme_model(m), p, values, ts, q, mc);
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  bool pass;
  double value;
  double target;
  double std_error;
  std::string detail;
};

Check from_report(const std::string& name, const McReport& r, const std::string& detail = "") {
  return {name, r.pass, r.estimate, r.target, r.std_error, detail.empty() ? render(r) : detail};
}

std::vector<Check> run_validation(const Model& m) {
  std::vector<Check> checks;
  const auto& cfg = m.cfg;
  const GsppParams gp = m.gspp();
  const double t = cfg.t.empty() ? 1.0 : cfg.t.front();
  const auto finite = unit_moments(m.spec).finite();
  std::uint64_t salt = 100;

  {
    const GcpParams g = m.gcp();
    std::vector<double> pmf;
    for (int k = 0; k < 40; ++k) pmf.push_back(gcp_pmf(k, 1.0, g));
    const double tv = mc_pmf_tv(
        [g](RandomStream& rng) { return gcp_sample_path(g, 1.0, rng).count_at(1.0); }, pmf,
        m.mc(++salt));
    checks.push_back({"gcp_path_law_tv", tv < 0.01, tv, 0.0, 0.0, "TV < 0.01"});
  }
  {
    double worst = 0.0;
    for (std::uint64_t k = 0; k <= cfg.k_max; ++k) {
      const double a = gspp_pmf_generic(k, t, gp, m.ctl);
      const double b = gspp_pmf_conditioning(k, t, gp, m.ctl).value;
      worst = std::max(worst, std::abs(a - b));
    }
    checks.push_back({"gspp_pmf_jet_vs_conditioning", worst < 1e-8, worst, 0.0, 0.0,
                      "max |jet - conditioning| over k <= k_max"});
  }
  {
    const Pmf pmf = gspp_pmf_adaptive(t, gp, m.ctl);
    const double err = std::abs(pmf.total_mass() - 1.0);
    checks.push_back({"gspp_normalization", err < 1e-6, pmf.total_mass(), 1.0, pmf.tail_error,
                      "stored mass plus tail estimate"});
  }
  {
    const auto pmf = gspp_pmf_generic_table(std::max<std::uint64_t>(cfg.k_max, 30), t, gp);
    const double tv = mc_pmf_tv(
        [gp, t](RandomStream& rng) { return gspp_sample(t, gp, rng); }, pmf, m.mc(++salt));
    checks.push_back({"gspp_sampler_tv", tv < 0.01, tv, 0.0, 0.0, "TV < 0.01"});
  }
  if (finite) {
    const MomentTriple mt = gspp_moments(t, gp);
    auto sampler = [gp, t](RandomStream& rng) { return static_cast<double>(gspp_sample(t, gp, rng)); };
    checks.push_back(from_report("gspp_mean_mc", mc_mean(sampler, mt.mean, m.mc(++salt))));
    checks.push_back(
        from_report("gspp_variance_mc", mc_variance(sampler, mt.variance, m.mc(++salt))));
  }
  {
    const auto model = extreme_model(m);
    const std::vector<double> grid = {0.5, 1.0, 2.0, 4.0};
    McOptions o = m.mc(++salt);
    o.n = std::max<std::uint64_t>(o.n, 1000);
    const auto reports = extreme_mc(grid, model, o);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      checks.push_back(from_report("extreme_reliability_mc_t=" + format_double(grid[i]), reports[i]));
    }
    double worst = 0.0;
    for (double s : grid) {
      const double h = 1e-4 * s;
      const double d = -(std::log(extreme_reliability(s + h, model)) -
                         std::log(extreme_reliability(s - h, model))) / (2.0 * h);
      const double r = extreme_failure_rate(s, model);
      worst = std::max(worst, r > 0.0 ? std::abs(d - r) / r : std::abs(d));
    }
    checks.push_back({"failure_rate_identity", worst < 1e-6, worst, 0.0, 0.0,
                      "max relative |r + (log R)'|"});
  }
  {
    const CumulativeShockModel model{cfg.threshold ? cfg.threshold : 3, m.gcp(), m.spp()};
    checks.push_back(from_report("cumulative_reliability_mc", cumulative_mc(t, model, m.mc(++salt))));
  }
  {
    const std::vector<double> s_points = {0.25, 0.5, 1.0, 2.0, 4.0};
    for (double s : s_points) {
      const double target = std::exp(-laplace_exponent(m.spec, s));
      const auto& spec = m.spec;
      const McReport r = mc_laplace(
          [&spec](RandomStream& rng) { return subordinator_sample(spec, 1.0, rng); }, s, target,
          m.mc(++salt));
      checks.push_back(from_report("subordinator_laplace_s=" + format_double(s), r));
    }
  }
  return checks;
}

Table cmd_validate(const Model& m, bool& all_pass) {
  Table table;
  table.columns = {"check", "pass", "value", "target", "std_error", "detail"};
  all_pass = true;
  for (const auto& c : run_validation(m)) {
    all_pass = all_pass && c.pass;
    table.rows.push_back({c.name, c.pass, number_cell(c.value), number_cell(c.target),
                          number_cell(c.std_error), c.detail});
  }
  table.extra["pass"] = all_pass;
  return table;
}

void write_error(std::ostream& err, ErrorCode code, const std::string& message,
                 const json& extra = json::object()) {
  json e = {{"code", std::string(error_code_name(code))},
            {"exit_code", static_cast<int>(code)},
            {"message", message}};
  e.update(extra);
  err << json{{"error", e}}.dump() << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  return f;
}

}  // namespace

json RunConfig::to_json() const {
  json j = {{"command", command},
            {"process", process},
            {"subordinator", subordinator},
            {"lambda", lambda},
            {"mu", mu},
            {"t", t},
            {"k_max", k_max},
            {"q", q},
            {"threshold", threshold},
            {"jumps", jumps},
            {"factors", factors},
            {"seed", seed},
            {"n", n},
            {"threads", threads},
            {"out", out},
            {"format", format},
            {"tol", tol},
            {"max_terms", max_terms},
            {"parameter", parameter},
            {"values", values},
            {"quantity", quantity},
            {"mc", mc},
            {"y", y}};
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw_invalid("configuration must be a JSON object");
  RunConfig c;
  c.command = get_or<std::string>(j, "command", "");
  c.process = get_or<std::string>(j, "process", c.process);
  if (j.contains("subordinator")) c.subordinator = j.at("subordinator");
  c.lambda = get_or<double>(j, "lambda", c.lambda);
  c.mu = get_or<double>(j, "mu", c.mu);
  c.t = list_or(j, "t");
  c.k_max = get_or<std::uint64_t>(j, "k_max", c.k_max);
  c.q = get_or<double>(j, "q", c.q);
  c.threshold = get_or<std::uint64_t>(j, "threshold", c.threshold);
  if (j.contains("jumps")) c.jumps = j.at("jumps");
  if (j.contains("factors")) c.factors = j.at("factors");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.n = get_or<std::uint64_t>(j, "n", c.n);
  c.threads = get_or<std::uint64_t>(j, "threads", c.threads);
  c.out = get_or<std::string>(j, "out", c.out);
  c.format = get_or<std::string>(j, "format", c.format);
  c.tol = get_or<double>(j, "tol", c.tol);
  c.max_terms = get_or<std::uint64_t>(j, "max_terms", c.max_terms);
  c.parameter = get_or<std::string>(j, "parameter", c.parameter);
  c.values = list_or(j, "values");
  c.quantity = get_or<std::string>(j, "quantity", c.quantity);
  c.mc = get_or<bool>(j, "mc", c.mc);
  c.y = list_or(j, "y");
  check_process(c.process);
  if (c.format != "csv" && c.format != "json") {
    throw Error(ErrorCode::invalid_argument, "unknown format '" + c.format + "' (csv, json)");
  }
  // Normalize the subordinator through its validated form.
  c.subordinator = geocount::to_json(subordinator_from_json(c.subordinator));
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric subordinated Poisson process toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file");
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool mc_flag = false;
  for (const auto& f : kFlags) {
    const std::string name = std::string("--") + f.name;
    if (f.type == FlagType::boolean) {
      options[f.name] = app.add_flag(name, mc_flag, f.help);
    } else {
      options[f.name] = app.add_option(name, values[f.name], f.help);
    }
  }
  const char* commands[][2] = {
      {"pmf", "pmf table (or cdf at --y for gsmpp and gridded gscpp)"},
      {"moments", "mean, variance and covariance on the t grid"},
      {"simulate", "draw samples; summary against closed-form moments"},
      {"reliability", "shock-model reliability and failure rate"},
      {"sweep", "sensitivity sweep CSV"},
      {"validate", "oracle suite with Monte Carlo reports"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    write_error(err, ErrorCode::invalid_argument, e.what());
    return static_cast<int>(ErrorCode::invalid_argument);
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    json merged = json::object();
    if (config_path.empty()) {
      if (const char* env = std::getenv("GEOCOUNT_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) merge(merged, read_json_file(config_path));
    if (!merged.contains("subordinator")) merged["subordinator"] = RunConfig{}.subordinator;
    json env_patch = json::object();
    for (const auto& f : kFlags) {
      const std::string name = env_name(f.name);
      if (const char* v = std::getenv(name.c_str())) apply_flag(env_patch, f, v, name);
    }
    merge(merged, env_patch);
    json flag_patch = json::object();
    for (const auto& f : kFlags) {
      if (options[f.name]->count() == 0) continue;
      if (f.type == FlagType::boolean) {
        flag_patch[f.key] = mc_flag;
      } else {
        apply_flag(flag_patch, f, values[f.name], std::string("--") + f.name);
      }
    }
    merge(merged, flag_patch);
    merged["command"] = command;
    const RunConfig cfg = RunConfig::from_json(merged);
    const Model model(cfg);

    Table table;
    json summary;
    bool pass = true;
    if (command == "pmf") {
      table = cmd_pmf(model);
    } else if (command == "moments") {
      table = cmd_moments(model);
    } else if (command == "simulate") {
      table = cmd_simulate(model, summary);
    } else if (command == "reliability") {
      table = cmd_reliability(model);
    } else if (command == "sweep") {
      const SweepTable sweep = run_sweep(model);
      if (!sweep_is_ordered(sweep, expected_direction(sweep.parameter, sweep.quantity))) {
        table.warnings.push_back("sweep curves are not ordered in the expected direction");
      }
      std::ostringstream csv;
      write_sweep_csv(csv, sweep);
      if (cfg.format == "csv") {
        std::ostream* target = &out;
        std::ofstream file;
        if (!cfg.out.empty()) {
          file = open_out(cfg.out);
          target = &file;
        }
        *target << csv.str();
      } else {
        table.columns = {"parameter_name", "parameter_value", "t", std::string(sweep_quantity_name(sweep.quantity))};
        const bool with_mc = cfg.mc;
        if (with_mc) table.columns.insert(table.columns.end(), {"mc_estimate", "mc_stderr"});
        for (const auto& r : sweep.rows) {
          std::vector<json> row = {std::string(sweep_parameter_name(sweep.parameter)),
                                   r.parameter_value, r.t, r.value};
          if (with_mc) {
            row.push_back(*r.mc_estimate);
            row.push_back(*r.mc_stderr);
          }
          table.rows.push_back(row);
        }
      }
    } else {
      table = cmd_validate(model, pass);
    }

    const bool sweep_csv_written = command == "sweep" && cfg.format == "csv";
    if (!sweep_csv_written && !(command == "simulate" && cfg.out.empty())) {
      if (cfg.out.empty()) {
        write_table(out, table, cfg.format, command);
      } else {
        auto file = open_out(cfg.out);
        write_table(file, table, cfg.format, command);
      }
    }
    if (command == "simulate") out << summary.dump(2) << '\n';
    for (const auto& w : table.warnings) err << json{{"warning", w}}.dump() << '\n';
    if (!cfg.out.empty()) {
      auto file = open_out(cfg.out + ".config.json");
      file << cfg.to_json().dump(2) << '\n';
    }
    return pass ? 0 : 1;
  } catch (const ConvergenceError& e) {
    write_error(err, e.code(), e.what(),
                {{"partial_sum", number_cell(e.partial_sum())},
                 {"tail_estimate", number_cell(e.tail_estimate())}});
    return static_cast<int>(e.code());
  } catch (const Error& e) {
    write_error(err, e.code(), e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    write_error(err, ErrorCode::invalid_argument, e.what());
    return static_cast<int>(ErrorCode::invalid_argument);
  }
}

}  // namespace geocount::cli
