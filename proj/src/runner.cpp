#include "apsel/runner.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

#include "apsel/error.hpp"

namespace apsel::runner {

RunResult run_seeds(const config::ExperimentConfig& cfg, unsigned parallelism)
{
    cfg.validate();
    const auto seeds = cfg.seed_indices();
    const std::size_t n = seeds.size();
    if (parallelism == 0) {
        parallelism = std::max(1u, std::thread::hardware_concurrency());
    }
    parallelism = static_cast<unsigned>(std::min<std::size_t>(parallelism, n));

    struct Slot {
        std::optional<metrics::SeedSummary> summary;
        std::optional<engine::SimulationResult> kept;
        std::string error;
    };
    std::vector<Slot> slots(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            try {
                auto result = engine::run_simulation(cfg.sim, cfg.master_seed, seeds[k]);
                slots[k].summary = metrics::summarize_seed(result.trace, seeds[k]);
                if (k < cfg.trace_seeds) {
                    slots[k].kept = std::move(result);
                }
            } catch (const std::exception& e) {
                slots[k].error = e.what();
            }
        }
    };
    if (parallelism <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < parallelism; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    RunResult out;
    for (std::size_t k = 0; k < n; ++k) {
        if (slots[k].summary) {
            out.summaries.push_back(std::move(*slots[k].summary));
        } else {
            out.failures.push_back({seeds[k], slots[k].error});
        }
        if (slots[k].kept) {
            out.traces.emplace(seeds[k], std::move(slots[k].kept->trace));
            out.deployments.emplace(seeds[k], std::move(slots[k].kept->deployment));
        }
    }
    if (out.summaries.empty()) {
        throw std::runtime_error("every seed failed; first error: " + (out.failures.empty() ? std::string() : out.failures.front().message));
    }
    std::sort(out.summaries.begin(), out.summaries.end(),
              [](const metrics::SeedSummary& a, const metrics::SeedSummary& b) { return a.seed_index < b.seed_index; });
    out.report = metrics::aggregate_seeds(out.summaries);
    return out;
}

} // namespace apsel::runner
