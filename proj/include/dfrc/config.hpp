// JSON configuration documents: scenarios (explicit or generated), merit
// selection and design options. Powers are in dB and angles in degrees in
// every document; everything is converted to linear units and radians here.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "dfrc/driver.hpp"
#include "dfrc/merit.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

using Json = nlohmann::json;

/// Reads and parses a JSON file; I/O and syntax problems become ConfigError.
Json read_json_file(const std::filesystem::path& path);

InstanceParams instance_params_from_json(const Json& j, const std::string& path = "generator");
Json instance_params_to_json(const InstanceParams& p);

/// Explicit scenario, or {"generator": {...}} for a random instance.
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);

/// {"kind": "power-mean", "p": -20} and friends; `num_subcarriers` sizes
/// the default uniform weights. Merits that are not concave and carry no
/// minorizer (quasi-arithmetic means failing the concavity test) are rejected.
MeritFunction merit_from_json(const Json& j, int num_subcarriers, const std::string& path = "merit");

DesignOptions design_options_from_json(const Json& j, const std::string& path = "design");

/// A scenario config file: the scenario plus optional merit and design sections.
struct ScenarioConfig {
  Scenario scenario;
  Json merit;   // null when absent
  Json design;  // null when absent
  std::optional<InstanceParams> generator;
  std::uint64_t generator_seed = 0;
};

ScenarioConfig scenario_config_from_json(const Json& j);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Throws ConfigError naming the first violation when validate() reports any.
void require_valid(const Scenario& s);

}  // namespace dfrc
