#pragma once

#include "trigs/harness.hpp"

#include <string>
#include <utility>
#include <vector>

namespace trigs {

/// Every key accepted by config files and flags, in echo order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ConfigError on unknown keys and
/// unparsable values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` text; '#' starts a comment, blank lines are skipped.
/// Duplicate keys: the last one wins.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Effective value of every key, ready to be written back as a config file.
/// `lambda` is the resolved value, so the echo reruns identically.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

std::string format_double(double v);

}  // namespace trigs
