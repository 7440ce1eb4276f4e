#include "mdi/config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "mdi/error.hpp"

namespace mdi {

namespace {

using FieldPtr = double ScenarioParams::*;

constexpr std::pair<const char*, FieldPtr> kFields[] = {
    {"p_z", &ScenarioParams::p_z},
    {"alpha0", &ScenarioParams::alpha0},
    {"alpha1", &ScenarioParams::alpha1},
    {"sigma_x", &ScenarioParams::sigma_x},
    {"beta0", &ScenarioParams::beta0},
    {"beta1", &ScenarioParams::beta1},
    {"sigma_y", &ScenarioParams::sigma_y},
    {"p_miss_0", &ScenarioParams::p_miss_0},
    {"p_miss_1", &ScenarioParams::p_miss_1},
};

}  // namespace

ScenarioParams scenario_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfig("config: expected a JSON object");

  ScenarioParams p;
  for (const auto& [key, value] : j.items()) {
    FieldPtr field = nullptr;
    for (const auto& [name, ptr] : kFields)
      if (key == name) field = ptr;
    if (field == nullptr) throw InvalidConfig("config: unknown field '" + key + "'");
    if (!value.is_number())
      throw InvalidConfig("config: field '" + key + "' must be a number");
    p.*field = value.get<double>();
  }
  try {
    p.validate();
  } catch (const InvalidParameter& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  return p;
}

ScenarioParams load_scenario_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const ScenarioParams& params) {
  nlohmann::ordered_json j;
  for (const auto& [name, ptr] : kFields) j[name] = params.*ptr;
  return j.dump(2) + "\n";
}

}  // namespace mdi
