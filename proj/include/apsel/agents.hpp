#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apsel/rng.hpp"

namespace apsel::agents {

using ApId = std::size_t;

/// Source of the random choices an agent makes. Production code draws from an
/// Rng; tests can script the outcomes to replay a known sequence.
class ChoiceSource {
public:
    virtual ~ChoiceSource() = default;
    virtual bool bernoulli(double p) = 0;
    /// Uniform index on [0, n).
    virtual std::size_t index(std::size_t n) = 0;
};

class RngChoice final : public ChoiceSource {
public:
    explicit RngChoice(Rng rng) : rng_(rng) {}
    bool bernoulli(double p) override { return rng_.bernoulli(p); }
    std::size_t index(std::size_t n) override { return static_cast<std::size_t>(rng_.index(n)); }

private:
    Rng rng_;
};

enum class Policy { StrongestSignal, EpsilonGreedy, EpsilonSticky, LoadAware };
enum class EpsilonSchedule { Fixed, Decreasing };

struct RewardStrategy {
    enum class Kind { Average, Weighted, Window };
    Kind kind = Kind::Average;
    std::size_t window = 0; // used by Kind::Window

    static RewardStrategy average() { return {}; }
    static RewardStrategy weighted() { return {Kind::Weighted, 0}; }
    static RewardStrategy last(std::size_t n) { return {Kind::Window, n}; }
};

inline constexpr std::size_t kStickForever = std::numeric_limits<std::size_t>::max();

struct AgentConfig {
    Policy policy = Policy::EpsilonSticky;
    std::optional<double> epsilon; // unset: per-policy default
    EpsilonSchedule epsilon_schedule = EpsilonSchedule::Fixed;
    std::size_t sticky_max = 2;
    RewardStrategy reward;
    double rho = 0.03;
    double rssi_change_db = 3.0;

    /// ε-greedy 0.05, ε-sticky 0.1 unless overridden.
    double base_epsilon() const;
    /// ε for the agent's `step`-th decision (1-based).
    double epsilon_at(std::size_t step) const;
    bool learns() const { return policy == Policy::EpsilonGreedy || policy == Policy::EpsilonSticky; }
    void validate() const;
};

Policy parse_policy(const std::string& name);
std::string to_string(Policy p);

struct VisibleAp {
    ApId ap = 0;
    double rssi_dbm = 0.0;
};

/// Reward record for one arm.
struct ArmStats {
    ApId ap = 0;
    std::size_t visits = 0;
    double sum = 0.0;
    std::deque<double> history; // retained only when the strategy needs it
    double aggregate = 0.0;
};

struct AgentState {
    std::vector<VisibleAp> snapshot; // visibility the arms were built from
    std::vector<ArmStats> arms;      // aligned with snapshot
    std::optional<ApId> current_ap;
    std::size_t sticky_counter = 0;
    bool sticking = false;
    bool last_satisfied = false;
    bool rescan = true; // next decision is a full strongest-signal scan
    std::size_t decisions = 0;

    /// Arm index for `ap`, or npos.
    std::size_t arm_of(ApId ap) const;
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

/// Throughput counts as fully delivered above this normalized value.
inline constexpr double kSatisfiedThreshold = 1.0 - 1e-9;

inline bool is_satisfied(double normalized) { return normalized >= kSatisfiedThreshold; }

/// Highest RSSI wins; ties are broken uniformly. `row` must be non-empty.
ApId ss_decide(std::span<const VisibleAp> row, ChoiceSource& choice);

/// Explores a uniform arm (current one included) with probability epsilon,
/// otherwise exploits the best aggregate with uniform tie breaking.
ApId eps_greedy_decide(const AgentState& state, double epsilon, ChoiceSource& choice);

/// ε-greedy with stickiness. Updates the sticky counter in `state`.
///
/// A satisfied last round (re)arms the counter to `sticky_max` and keeps the
/// AP. While sticking, each unsatisfied round decrements the counter and keeps
/// the AP; when it reaches zero stickiness ends and this decision falls back to
/// ε-greedy.
ApId eps_sticky_decide(AgentState& state, const AgentConfig& config, double epsilon, ChoiceSource& choice);

/// Satisfied: stay. Otherwise with probability rho move to the visible AP
/// with the lowest broadcast load (uniform ties); `broadcast_loads` is aligned
/// with `state.snapshot`.
ApId load_aware_decide(const AgentState& state, std::span<const double> broadcast_loads, double rho, bool satisfied_last_round,
                       ChoiceSource& choice);

/// Folds `reward` (in [0, 1]) into `stats` under `strategy`.
void update_reward(ArmStats& stats, double reward, const RewardStrategy& strategy);

/// Clears rewards and stickiness when the visible AP set changed or any AP's
/// RSSI moved by at least `delta_db`. Returns true on reset.
bool maybe_reset(AgentState& state, std::span<const VisibleAp> new_visibility, double delta_db);

/// A STA's association logic: a policy plus its private state.
class Agent {
public:
    explicit Agent(AgentConfig config) : config_(std::move(config)) {}

    const AgentConfig& config() const { return config_; }
    const AgentState& state() const { return state_; }
    AgentState& state() { return state_; }

    /// First sight of the network (activation).
    void activate(std::span<const VisibleAp> row);

    /// New visibility after the STA moved. Learning agents may reset; the
    /// others rescan only when their AP dropped out of range.
    void on_moved(std::span<const VisibleAp> row);

    /// Chooses an AP among the current snapshot. `broadcast_loads` is only
    /// read by load-aware agents.
    ApId decide(std::span<const double> broadcast_loads, ChoiceSource& choice);

    /// Reward for the AP chosen this round.
    void observe(double normalized_throughput);

private:
    AgentConfig config_;
    AgentState state_;
};

} // namespace apsel::agents
