#pragma once

#include <string>

#include "mdi/scenario.hpp"

namespace mdi {

// Scenario config file: a JSON object whose keys are exactly the
// ScenarioParams field names. Absent fields keep their defaults; unknown
// fields are rejected. Throws InvalidConfig (or IoError for the file
// variant).
ScenarioParams scenario_from_json_text(const std::string& text);
ScenarioParams load_scenario_config(const std::string& path);
std::string scenario_to_json_text(const ScenarioParams& params);

}  // namespace mdi
