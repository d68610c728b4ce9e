#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apsel/engine.hpp"
#include "apsel/metrics.hpp"

namespace apsel::io {

/// One row per (round, active STA): round, sta_id, ap_id, load_mbps,
/// throughput_mbps, normalized_throughput, satisfied, reassociated, agent.
void write_trace_csv(const std::filesystem::path& path, std::span<const engine::RoundRecord> trace);

/// Inverse of write_trace_csv. `n_stas` sizes each record; STAs without a row are inactive.
std::vector<engine::RoundRecord> read_trace_csv(const std::filesystem::path& path, std::size_t n_stas);

/// One row per (round, AP): round, ap_id, channel, raw_occupancy, offered_load_mbps.
void write_occupancy_csv(const std::filesystem::path& path, std::span<const engine::RoundRecord> trace, std::span<const int> channels);

/// per_round.csv, cdf.csv, boxplot.csv, per_seed.csv and summary.json in `dir`.
void write_report(const std::filesystem::path& dir, const metrics::Report& report, const nlohmann::json& extra);

nlohmann::json report_to_json(const metrics::Report& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Creates `dir`; refuses a directory that already has entries.
void prepare_output_dir(const std::filesystem::path& dir);

} // namespace apsel::io
