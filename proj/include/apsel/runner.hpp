#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "apsel/config.hpp"
#include "apsel/engine.hpp"
#include "apsel/metrics.hpp"

namespace apsel::runner {

struct SeedFailure {
    std::uint64_t seed_index = 0;
    std::string message;
};

struct RunResult {
    metrics::Report report;
    std::vector<metrics::SeedSummary> summaries; // sorted by seed index
    std::map<std::uint64_t, std::vector<engine::RoundRecord>> traces;
    std::map<std::uint64_t, scenario::Deployment> deployments; // for traced seeds
    std::vector<SeedFailure> failures;
};

/// Runs every seed of `cfg` on up to `parallelism` threads (0: hardware
/// concurrency). The merged result does not depend on the thread count.
/// A seed that throws is reported in `failures` and left out of the report.
RunResult run_seeds(const config::ExperimentConfig& cfg, unsigned parallelism = 0);

} // namespace apsel::runner
