#pragma once

#include <json.hpp>
#include <string>

#include "skirmish/engine.hpp"

namespace skirmish {

nlohmann::json state_to_json(const GameState& state);
GameState state_from_json(const nlohmann::json& j);

/// Compact action code: "m:<dir>" or "a:<slot>".
std::string action_code(const Action& a);
Action action_from_code(const std::string& code);

}  // namespace skirmish
