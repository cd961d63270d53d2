#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fasbeam/harness/experiment.hpp"

namespace fasbeam::harness {

// "section.key" -> value, in file order.
using Settings = std::vector<std::pair<std::string, std::string>>;

// INI-style file: [section] headers, key = value lines, ';' or '#' comments.
Settings read_settings(const std::filesystem::path& path);
// Parses "section.key=value".
std::pair<std::string, std::string> parse_assignment(const std::string& text);

// Applies one setting; throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

// Defaults, then the preset (flag over file over desk), then every other
// setting in order. The result is validated.
ExperimentSpec build_spec(const Settings& settings, std::optional<GnnPreset> preset_flag = {});

// Every recognised key, for help output.
std::vector<std::string> known_keys();

}  // namespace fasbeam::harness
