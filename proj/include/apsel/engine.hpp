#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "apsel/agents.hpp"
#include "apsel/phy.hpp"
#include "apsel/rng.hpp"
#include "apsel/scenario.hpp"

namespace apsel::engine {

using agents::ApId;

inline constexpr ApId kNoAp = std::numeric_limits<ApId>::max();

struct PhyConfig {
    phy::PathLossParams path_loss;
    phy::TimingParams timing;
    double tx_power_dbm = 20.0;
    double sensitivity_dbm = -82.0;
    phy::RateTableSet rate_tables = phy::builtin_rate_tables();

    const phy::RateTable& table(int bandwidth_mhz) const;
    void validate(int bandwidth_mhz) const;
};

struct Link {
    double path_loss_db = 0.0;
    double rssi_dbm = 0.0;
    std::optional<phy::Rates> rates; // nullopt: below the lowest rate entry
    bool in_coverage = false;        // rssi >= sensitivity
    bool visible = false;            // in coverage and a rate is defined
};

/// Per (STA, AP) propagation results.
class LinkTable {
public:
    LinkTable() = default;
    LinkTable(std::size_t n_stas, std::size_t n_aps) : n_aps_(n_aps), links_(n_stas * n_aps) {}

    std::size_t n_stas() const { return n_aps_ == 0 ? 0 : links_.size() / n_aps_; }
    std::size_t n_aps() const { return n_aps_; }

    const Link& at(std::size_t sta, ApId ap) const { return links_[sta * n_aps_ + ap]; }
    Link& at(std::size_t sta, ApId ap) { return links_[sta * n_aps_ + ap]; }

    /// Recomputes every link of one STA. `shadow_db` holds one value per AP.
    void rebuild_row(std::size_t sta, const scenario::Point& sta_pos, const std::vector<scenario::Point>& aps,
                     std::span<const double> shadow_db, const PhyConfig& phy, const phy::RateTable& table);

    /// Visible APs of a STA in AP order.
    std::vector<agents::VisibleAp> visibility(std::size_t sta) const;

    /// Strongest AP regardless of visibility.
    ApId strongest(std::size_t sta) const;

private:
    std::size_t n_aps_ = 0;
    std::vector<Link> links_;
};

/// Read-only view of one round's network used by the occupancy/throughput
/// model. `associations[i] == kNoAp` marks an inactive STA.
struct NetworkView {
    const LinkTable& links;
    std::span<const int> ap_channels;
    std::span<const ApId> associations;
    std::span<const double> loads_mbps;
    const PhyConfig& phy;
    const phy::RateTable& table;
};

/// Rates the STA uses towards its serving AP; the lowest table entry when out of range.
phy::Rates serving_rates(const NetworkView& net, std::size_t sta);

/// Required airtime of an associated STA on its serving link.
double sta_airtime(const NetworkView& net, std::size_t sta);

/// Sum of required airtimes seen by `ap`: its own STAs plus STAs of
/// co-channel APs that are inside `ap`'s coverage. Not capped at 1.
double raw_occupancy(ApId ap, const NetworkView& net);

/// raw_occupancy for every AP in one pass.
std::vector<double> raw_occupancies(const NetworkView& net);

struct Throughput {
    double mbps = 0.0;
    double normalized = 0.0;
};

/// Delivered throughput: demand / max(1, raw occupancy of the serving AP).
Throughput sta_throughput(std::size_t sta, const NetworkView& net);

struct StaRound {
    ApId ap = kNoAp;
    double load_mbps = 0.0;
    double throughput_mbps = 0.0;
    double normalized = 0.0;
    bool active = false;
    bool satisfied = false;
    bool reassociated = false;
    bool out_of_range = false;
    bool agent = false; // runs a learning or load-aware policy
};

struct ApRound {
    double raw_occupancy = 0.0;
    double offered_load_mbps = 0.0;
};

struct RoundRecord {
    int round = 0;
    std::vector<StaRound> stas;
    std::vector<ApRound> aps;
};

struct SimulationConfig {
    // Generated deployment (ignored when `deployment` is set).
    scenario::Area area;
    std::size_t n_aps = 16;
    scenario::ApPlacement ap_placement = scenario::ApPlacement::Grid;
    std::size_t n_stas = 64;
    scenario::StaPlacement sta_placement = scenario::StaPlacement::Clustered;
    int cluster_size = 10;
    double cluster_box_m = 10.0;
    int bandwidth_mhz = 20;
    scenario::ChannelMode channel_mode = scenario::ChannelMode::GridPattern;
    double reuse_factor = 2.0;

    std::optional<scenario::Deployment> deployment;

    scenario::LoadModel load;
    PhyConfig phy;

    agents::AgentConfig agent;
    double agent_fraction = 1.0;                                   // share of STAs running `agent`; others use SS
    std::vector<std::pair<std::size_t, agents::AgentConfig>> overrides; // per-STA policy overrides

    int rounds = 240;
    int arrival_window = 0; // <= 1: everybody active from round 1
    scenario::MobilityModel mobility;

    void validate() const;
};

/// Per-STA factory for choice sources; replaces the seeded agent streams.
using ChoiceFactory = std::function<std::unique_ptr<agents::ChoiceSource>(std::size_t sta)>;

struct NetworkState {
    scenario::Deployment deployment;
    std::vector<double> shadow_db; // n_stas x n_aps
    LinkTable links;
    std::vector<ApId> associations;
    std::vector<double> loads_mbps;
    std::vector<bool> active;
    std::vector<int> arrival_round;
    std::vector<agents::Agent> agents;
    std::vector<bool> satisfied;
};

/// One seeded run. All randomness comes from per-purpose streams derived from
/// (master_seed, seed_index).
class Simulation {
public:
    Simulation(const SimulationConfig& config, std::uint64_t master_seed, std::uint64_t seed_index, ChoiceFactory choices = {});

    /// Executes round `round_index` (1-based, consecutive).
    RoundRecord run_round(int round_index);

    const NetworkState& state() const { return state_; }
    const SimulationConfig& config() const { return config_; }
    const phy::RateTable& rate_table() const { return *table_; }

private:
    NetworkView view() const;
    void rebuild_links(std::size_t sta);

    SimulationConfig config_;
    const phy::RateTable* table_ = nullptr;
    NetworkState state_;
    Rng loads_rng_;
    Rng mobility_rng_;
    Rng order_rng_;
    std::vector<std::unique_ptr<agents::ChoiceSource>> choices_;
    int last_round_ = 0;
};

struct SimulationResult {
    std::vector<RoundRecord> trace;
    std::vector<agents::AgentState> final_agents;
    scenario::Deployment deployment;
};

/// Runs `config.rounds` rounds. Deterministic in (config, master_seed, seed_index).
SimulationResult run_simulation(const SimulationConfig& config, std::uint64_t master_seed, std::uint64_t seed_index);

/// Builds the deployment for a seed (fixed deployment, or generated from the
/// placement stream).
scenario::Deployment build_deployment(const SimulationConfig& config, std::uint64_t master_seed, std::uint64_t seed_index);

/// One row of an exhaustive association table.
struct AssignmentOutcome {
    std::vector<ApId> associations;
    std::vector<double> airtime;        // required airtime on the serving link
    std::vector<double> served_airtime; // airtime / max(1, occupancy)
    std::vector<double> throughput_mbps;
    std::vector<double> normalized;
    bool all_satisfied = false;
};

/// Enumerates every association of the STAs over their visible APs (all APs
/// for a STA with none visible) using fixed per-STA loads.
std::vector<AssignmentOutcome> enumerate_associations(const scenario::Deployment& deployment, std::span<const double> loads_mbps,
                                                      const PhyConfig& phy, std::span<const double> shadow_db = {});

} // namespace apsel::engine
