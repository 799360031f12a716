#pragma once

#include <nlohmann/json.hpp>

#include "geocount/gsmpp.hpp"
#include "geocount/jump_law.hpp"
#include "geocount/subordinator.hpp"

namespace geocount {

/// {"family": "stable", "alpha": ...} and so on; unknown families throw
/// ErrorCode::unknown_family.
nlohmann::json to_json(const SubordinatorSpec& spec);
SubordinatorSpec subordinator_from_json(const nlohmann::json& j);

/// {"kind": "discrete", "pmf": [...]} or
/// {"kind": "grid", "origin": ..., "step": ..., "values": [...]}.
nlohmann::json to_json(const JumpLaw& law);
JumpLaw jump_law_from_json(const nlohmann::json& j);

/// {"kind": "atoms", "values": [...], "probs": [...]} or
/// {"kind": "log_grid", "origin": ..., "step": ..., "values": [...]}.
nlohmann::json to_json(const FactorLaw& law);
FactorLaw factor_law_from_json(const nlohmann::json& j);

}  // namespace geocount
