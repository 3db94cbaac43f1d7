#pragma once

#include <map>
#include <string>

#include "oriole/sweep.hpp"

namespace oriole {

using ConfigMap = std::map<std::string, std::string>;

/// Parses flat "key = value" text; '#' starts a comment, blank lines skipped.
ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

/// Applies known keys onto the config; unknown keys raise InputError.
void apply_experiment_keys(const ConfigMap& map, ExperimentConfig& cfg);
void apply_sweep_keys(const ConfigMap& map, SweepSpec& spec);

/// Canonical "key = value" echoes; reparsing them reproduces the config.
std::string echo_scenario_config(const ScenarioConfig& cfg);
std::string echo_experiment_config(const ExperimentConfig& cfg);

}  // namespace oriole
