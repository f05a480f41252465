#pragma once

#include "cogmcs/dqn_agent.hpp"
#include "cogmcs/envsim.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace cogmcs {

struct RunConfig {
    ScenarioConfig scenario;
    AgentConfig agent;
};

// Plain-text `key = value` lines; `#` starts a comment, lists are comma
// separated. Keys are the field names of ScenarioConfig and AgentConfig.
// Keys not present keep their defaults.
// Throws ConfigError for unknown keys or invalid values, FormatError for
// unparsable lines or numbers.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

std::string format_config(const RunConfig& config);

// "0,0.5,1" -> {0, 0.5, 1}. Throws FormatError.
std::vector<double> parse_number_list(std::string_view text);

} // namespace cogmcs
