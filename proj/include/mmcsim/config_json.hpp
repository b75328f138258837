#pragma once

#include <stdexcept>
#include <string>

#include "mmcsim/scenario.hpp"

namespace mmcsim {

/// Raised for malformed or out-of-range configuration input. The message
/// carries the JSON location (line/column for syntax, key path otherwise).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses a config document and applies it on top of `base`. Sections and
/// keys are all optional; unknown keys are rejected. "fault": null clears an
/// inherited fault. Throws ConfigError; does not validate ranges (call
/// ScenarioConfig::validate for that).
ScenarioConfig apply_config_json(const ScenarioConfig& base,
                                 const std::string& json_text);

/// Full round-trippable echo of a configuration.
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace mmcsim
