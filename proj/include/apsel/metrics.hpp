#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "apsel/engine.hpp"

namespace apsel::metrics {

/// Linear interpolation between order statistics; q in [0, 1].
double percentile(std::vector<double> values, double q);

struct EcdfPoint {
    double value = 0.0;
    double fraction = 0.0;
};

/// Right-continuous empirical CDF, one point per distinct value.
std::vector<EcdfPoint> ecdf(std::vector<double> values);

struct RoundStats {
    int round = 0;
    std::size_t active = 0;
    double mean = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double min = 0.0;
    double max = 0.0;
    double agent_mean = 0.0;     // NaN when no active agent
    double non_agent_mean = 0.0; // NaN when no active non-agent
    double unsatisfied_fraction = 0.0;
    std::size_t reassociations = 0;
};

struct SeedSummary {
    std::uint64_t seed_index = 0;
    std::vector<RoundStats> rounds;
    std::vector<double> final_normalized; // active STAs of the last round
    std::vector<bool> final_agent;
    std::size_t reassociations = 0;
    double final_unsatisfied_fraction = 0.0;

    const RoundStats& final_round() const { return rounds.back(); }
};

SeedSummary summarize_seed(std::span<const engine::RoundRecord> trace, std::uint64_t seed_index = 0);

struct BoxStats {
    double min = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

BoxStats box_stats(const std::vector<double>& values);

struct Report {
    std::size_t seeds = 0;
    std::vector<double> mean_per_round;           // across-seed mean of per-round means
    std::vector<double> agent_mean_per_round;     // NaN where undefined
    std::vector<double> non_agent_mean_per_round; // NaN where undefined
    std::vector<double> unsatisfied_per_round;
    std::vector<double> pooled_final;             // final-round values of every seed
    std::vector<std::uint64_t> seed_indices;
    std::vector<double> seed_final_means;
    std::vector<std::size_t> seed_reassociations;
    std::size_t total_reassociations = 0;
    double final_mean = 0.0;
    double final_unsatisfied_fraction = 0.0; // pooled
    BoxStats final_box;
};

/// Order-invariant merge: summaries are sorted by seed index first.
Report aggregate_seeds(std::vector<SeedSummary> summaries);

/// Sum of reassociations of A over sum of B across paired seed indices.
/// Infinity when B has none and A has some; NaN when both are zero.
double reassociation_ratio(const Report& a, const Report& b);

} // namespace apsel::metrics
