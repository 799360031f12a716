#include "geocount/json_io.hpp"

#include "geocount/error.hpp"

namespace geocount {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw_invalid(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw_invalid(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

// First present key among aliases.
double number_alias(const json& j, const char* key, const char* alias) {
  return j.contains(alias) && !j.contains(key) ? number(j, alias) : number(j, key);
}

std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw_invalid(std::string("field '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw_invalid(std::string("field '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string kind_of(const json& j, const char* key) {
  if (!j.is_object()) throw_invalid("expected a JSON object");
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw_invalid(std::string("missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

json to_json(const SubordinatorSpec& spec) {
  json j;
  j["family"] = std::string(spec.family_name());
  if (const auto* f = spec.get<StableFamily>()) {
    j["alpha"] = f->alpha;
  } else if (const auto* f = spec.get<TemperedStableFamily>()) {
    j["alpha"] = f->alpha;
    j["nu"] = f->nu;
  } else if (const auto* f = spec.get<GammaFamily>()) {
    j["shape"] = f->shape;
    j["rate"] = f->rate;
  } else if (const auto* f = spec.get<InverseGaussianFamily>()) {
    j["delta"] = f->delta;
    j["gamma"] = f->gamma;
  } else if (const auto* f = spec.get<MixedStableFamily>()) {
    j["weights"] = f->weights;
    j["alphas"] = f->alphas;
  } else if (const auto* f = spec.get<MixedTemperedFamily>()) {
    j["weights"] = f->weights;
    j["alphas"] = f->alphas;
    j["nus"] = f->nus;
  }
  return j;
}

SubordinatorSpec subordinator_from_json(const json& j) {
  const std::string family = kind_of(j, "family");
  if (family == "stable") return SubordinatorSpec::stable(number(j, "alpha"));
  if (family == "tempered_stable") {
    return SubordinatorSpec::tempered_stable(number(j, "alpha"), number(j, "nu"));
  }
  if (family == "gamma") {
    return SubordinatorSpec::gamma(number_alias(j, "shape", "p"), number_alias(j, "rate", "beta"));
  }
  if (family == "inverse_gaussian") {
    return SubordinatorSpec::inverse_gaussian(number(j, "delta"), number(j, "gamma"));
  }
  if (family == "mixed_stable") {
    return SubordinatorSpec::mixed_stable(numbers(j, "weights"), numbers(j, "alphas"));
  }
  if (family == "mixed_tempered") {
    return SubordinatorSpec::mixed_tempered(numbers(j, "weights"), numbers(j, "alphas"),
                                            numbers(j, "nus"));
  }
  throw Error(ErrorCode::unknown_family,
              "unknown subordinator family '" + family +
                  "' (stable, tempered_stable, gamma, inverse_gaussian, mixed_stable, "
                  "mixed_tempered)");
}

json to_json(const JumpLaw& law) {
  if (law.kind() == JumpKind::discrete) return {{"kind", "discrete"}, {"pmf", law.values()}};
  return {{"kind", "grid"}, {"origin", law.origin()}, {"step", law.step()}, {"values", law.values()}};
}

JumpLaw jump_law_from_json(const json& j) {
  const std::string kind = kind_of(j, "kind");
  if (kind == "discrete") return JumpLaw::discrete(numbers(j, "pmf"));
  if (kind == "grid") return JumpLaw::grid(number(j, "origin"), number(j, "step"), numbers(j, "values"));
  throw_invalid("unknown jump law kind '" + kind + "' (discrete, grid)");
}

json to_json(const FactorLaw& law) {
  if (law.atomic()) {
    return {{"kind", "atoms"}, {"values", law.atom_values()}, {"probs", law.atom_probs()}};
  }
  const JumpLaw& g = law.log_law();
  return {{"kind", "log_grid"}, {"origin", g.origin()}, {"step", g.step()}, {"values", g.values()}};
}

FactorLaw factor_law_from_json(const json& j) {
  const std::string kind = kind_of(j, "kind");
  if (kind == "atoms") return FactorLaw::atoms(numbers(j, "values"), numbers(j, "probs"));
  if (kind == "log_grid") {
    return FactorLaw::log_grid(
        JumpLaw::grid(number(j, "origin"), number(j, "step"), numbers(j, "values")));
  }
  throw_invalid("unknown factor law kind '" + kind + "' (atoms, log_grid)");
}

}  // namespace geocount
