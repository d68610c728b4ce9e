#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apsel/config.hpp"
#include "apsel/runner.hpp"

namespace apsel::presets {

/// Enterprise scenario used by the named presets: library defaults with a
/// 26 dBm transmit power (EIRP including antenna gain).
config::ExperimentConfig scenario_defaults();

/// Two APs on channels 36/40 and two STAs asking for 12 and 15 Mb/s, with a
/// three-entry rate table that gives the airtimes of the classic
/// association-anomaly example.
config::ExperimentConfig toy_config();

struct Arm {
    std::string label;
    config::ExperimentConfig cfg;
};

struct Preset {
    std::string name;
    std::string description;
    std::vector<Arm> arms;
};

std::vector<std::string> preset_names();

/// Builds a preset on top of `base`; each arm then sets its own policy and
/// scenario keys. Throws ConfigError listing the presets for an unknown name.
Preset make_preset(const std::string& name, const config::ExperimentConfig& base);
Preset make_preset(const std::string& name);

struct ArmResult {
    std::string label;
    config::ExperimentConfig cfg;
    runner::RunResult run;
};

struct PresetResult {
    std::string name;
    std::vector<ArmResult> arms;
    std::vector<engine::AssignmentOutcome> enumeration; // toy preset only

    const ArmResult& arm(const std::string& label) const;
};

PresetResult run_preset(const Preset& preset, unsigned parallelism = 0);

/// Scalars per arm plus gains over the "ss" arm of the same group.
nlohmann::json comparisons(const PresetResult& result);

/// Exhaustive association table for the fixed deployment of `cfg`. Loads
/// come from the deployment's per-STA demands, or the configured mean.
std::vector<engine::AssignmentOutcome> enumerate(const config::ExperimentConfig& cfg);

/// CSV rendering of an enumeration (one row per assignment and STA).
std::string enumeration_csv(const std::vector<engine::AssignmentOutcome>& table, std::span<const double> loads_mbps);

void write_preset(const std::filesystem::path& dir, const PresetResult& result);

} // namespace apsel::presets
