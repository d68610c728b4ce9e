#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apsel/engine.hpp"

namespace apsel::config {

/// Fully resolved experiment description.
struct ExperimentConfig {
    engine::SimulationConfig sim;
    std::uint64_t master_seed = 1;
    std::size_t seeds = 100;
    std::vector<std::uint64_t> seed_list; // when set, replaces 0..seeds-1
    unsigned parallelism = 0;             // 0: hardware concurrency
    std::size_t trace_seeds = 1;          // leading seeds whose full trace is exported
    std::filesystem::path output_dir;
    std::filesystem::path deployment_file;
    std::filesystem::path rate_table_file;

    std::vector<std::uint64_t> seed_indices() const;
    void validate() const;
};

struct KeyInfo {
    std::string name;
    std::string help;
};

/// Every accepted configuration key, in echo order.
const std::vector<KeyInfo>& keys();

/// Applies one key. Relative file paths are resolved against `base_dir`.
/// Throws ConfigError naming the key on a bad value or an unknown key.
void apply_key(ExperimentConfig& cfg, const std::string& key, const nlohmann::json& value,
               const std::filesystem::path& base_dir = {});

/// Applies every member of a JSON object.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& obj, const std::filesystem::path& base_dir = {});

/// Interprets a command-line value: JSON when it parses, a plain string otherwise.
nlohmann::json parse_flag_value(const std::string& text);

/// Defaults overlaid with the file contents. An empty file means all defaults.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Resolved configuration; `apply_json(ExperimentConfig{}, to_json(c))` rebuilds `c`.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Closest accepted key by edit distance, or "" when nothing is close.
std::string suggest_key(const std::string& unknown);

} // namespace apsel::config
