#include "apsel/agents.hpp"

#include <algorithm>
#include <cmath>

#include "apsel/error.hpp"

namespace apsel::agents {

namespace {

// Picks uniformly among the indices whose score equals the best score.
template <typename Better>
std::size_t best_index(std::size_t n, Better better, ChoiceSource& choice)
{
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < n; ++i) {
        if (ties.empty() || better(i, ties.front()) > 0) {
            ties.assign(1, i);
        } else if (better(i, ties.front()) == 0) {
            ties.push_back(i);
        }
    }
    if (ties.size() == 1) {
        return ties.front();
    }
    return ties[choice.index(ties.size())];
}

int compare(double a, double b)
{
    return a > b ? 1 : (a < b ? -1 : 0);
}

std::vector<ArmStats> fresh_arms(std::span<const VisibleAp> row)
{
    std::vector<ArmStats> arms;
    arms.reserve(row.size());
    for (const auto& v : row) {
        ArmStats a;
        a.ap = v.ap;
        arms.push_back(a);
    }
    return arms;
}

} // namespace

double AgentConfig::base_epsilon() const
{
    if (epsilon) {
        return *epsilon;
    }
    if (epsilon_schedule == EpsilonSchedule::Decreasing) {
        return 1.0;
    }
    return policy == Policy::EpsilonGreedy ? 0.05 : 0.1;
}

double AgentConfig::epsilon_at(std::size_t step) const
{
    const double e0 = base_epsilon();
    if (epsilon_schedule == EpsilonSchedule::Fixed) {
        return e0;
    }
    return e0 / std::sqrt(static_cast<double>(std::max<std::size_t>(step, 1)));
}

void AgentConfig::validate() const
{
    const double e = base_epsilon();
    if (!(e >= 0.0 && e <= 1.0)) {
        throw ConfigError("epsilon must lie in [0, 1]");
    }
    if (sticky_max < 1) {
        throw ConfigError("sticky counter must be at least 1");
    }
    if (reward.kind == RewardStrategy::Kind::Window && reward.window < 1) {
        throw ConfigError("reward window must be at least 1");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw ConfigError("reassociation probability rho must lie in [0, 1]");
    }
    if (!(rssi_change_db > 0.0)) {
        throw ConfigError("RSSI change threshold must be positive");
    }
}

Policy parse_policy(const std::string& name)
{
    if (name == "ss") {
        return Policy::StrongestSignal;
    }
    if (name == "eps_greedy") {
        return Policy::EpsilonGreedy;
    }
    if (name == "eps_sticky") {
        return Policy::EpsilonSticky;
    }
    if (name == "load_aware") {
        return Policy::LoadAware;
    }
    throw ConfigError("unknown policy '" + name + "' (expected ss, eps_greedy, eps_sticky or load_aware)");
}

std::string to_string(Policy p)
{
    switch (p) {
    case Policy::StrongestSignal:
        return "ss";
    case Policy::EpsilonGreedy:
        return "eps_greedy";
    case Policy::EpsilonSticky:
        return "eps_sticky";
    case Policy::LoadAware:
        return "load_aware";
    }
    return "?";
}

std::size_t AgentState::arm_of(ApId ap) const
{
    for (std::size_t i = 0; i < arms.size(); ++i) {
        if (arms[i].ap == ap) {
            return i;
        }
    }
    return npos;
}

ApId ss_decide(std::span<const VisibleAp> row, ChoiceSource& choice)
{
    if (row.empty()) {
        throw ContractViolation("ss_decide: no AP in range");
    }
    const auto i = best_index(row.size(), [&](std::size_t a, std::size_t b) { return compare(row[a].rssi_dbm, row[b].rssi_dbm); },
                              choice);
    return row[i].ap;
}

ApId eps_greedy_decide(const AgentState& state, double epsilon, ChoiceSource& choice)
{
    const auto& arms = state.arms;
    if (arms.empty()) {
        throw ContractViolation("eps_greedy_decide: agent has no arms");
    }
    if (choice.bernoulli(epsilon)) {
        return arms[choice.index(arms.size())].ap;
    }
    const auto i = best_index(arms.size(), [&](std::size_t a, std::size_t b) { return compare(arms[a].aggregate, arms[b].aggregate); },
                              choice);
    return arms[i].ap;
}

ApId eps_sticky_decide(AgentState& state, const AgentConfig& config, double epsilon, ChoiceSource& choice)
{
    if (state.current_ap && state.last_satisfied) {
        state.sticking = true;
        state.sticky_counter = config.sticky_max;
        return *state.current_ap;
    }
    if (state.sticking) {
        if (state.sticky_counter != kStickForever && state.sticky_counter > 0) {
            --state.sticky_counter;
        }
        if (state.sticky_counter > 0) {
            return *state.current_ap;
        }
        state.sticking = false;
    }
    return eps_greedy_decide(state, epsilon, choice);
}

ApId load_aware_decide(const AgentState& state, std::span<const double> broadcast_loads, double rho, bool satisfied_last_round,
                       ChoiceSource& choice)
{
    if (!state.current_ap) {
        throw ContractViolation("load_aware_decide: STA is not associated");
    }
    if (satisfied_last_round || !choice.bernoulli(rho)) {
        return *state.current_ap;
    }
    if (broadcast_loads.size() != state.snapshot.size() || broadcast_loads.empty()) {
        throw ContractViolation("load_aware_decide: one broadcast load per visible AP required");
    }
    const auto i = best_index(broadcast_loads.size(),
                              [&](std::size_t a, std::size_t b) { return compare(broadcast_loads[b], broadcast_loads[a]); }, choice);
    return state.snapshot[i].ap;
}

void update_reward(ArmStats& stats, double reward, const RewardStrategy& strategy)
{
    if (!(reward >= 0.0 && reward <= 1.0)) {
        throw ContractViolation("update_reward: reward must lie in [0, 1]");
    }
    ++stats.visits;
    stats.sum += reward;
    switch (strategy.kind) {
    case RewardStrategy::Kind::Average:
        stats.aggregate = stats.sum / static_cast<double>(stats.visits);
        break;
    case RewardStrategy::Kind::Window: {
        stats.history.push_back(reward);
        while (stats.history.size() > strategy.window) {
            stats.history.pop_front();
        }
        double s = 0.0;
        for (double r : stats.history) {
            s += r;
        }
        stats.aggregate = s / static_cast<double>(stats.history.size());
        break;
    }
    case RewardStrategy::Kind::Weighted: {
        stats.history.push_back(reward);
        const auto n = static_cast<double>(stats.history.size());
        double num = 0.0;
        double den = 0.0;
        // x = 0 is the newest reward (weight 1); weights fall linearly by 1/n.
        std::size_t x = 0;
        for (auto it = stats.history.rbegin(); it != stats.history.rend(); ++it, ++x) {
            const double w = 1.0 - static_cast<double>(x) / n;
            num += w * *it;
            den += w;
        }
        stats.aggregate = num / den;
        break;
    }
    }
}

bool maybe_reset(AgentState& state, std::span<const VisibleAp> new_visibility, double delta_db)
{
    bool changed = new_visibility.size() != state.snapshot.size();
    if (!changed) {
        for (const auto& v : new_visibility) {
            auto it = std::find_if(state.snapshot.begin(), state.snapshot.end(), [&](const VisibleAp& s) { return s.ap == v.ap; });
            if (it == state.snapshot.end() || std::abs(it->rssi_dbm - v.rssi_dbm) >= delta_db) {
                changed = true;
                break;
            }
        }
    }
    if (!changed) {
        return false;
    }
    state.snapshot.assign(new_visibility.begin(), new_visibility.end());
    state.arms = fresh_arms(new_visibility);
    state.sticking = false;
    state.sticky_counter = 0;
    state.last_satisfied = false;
    state.rescan = true;
    return true;
}

void Agent::activate(std::span<const VisibleAp> row)
{
    state_.snapshot.assign(row.begin(), row.end());
    state_.arms = fresh_arms(row);
    state_.current_ap.reset();
    state_.sticking = false;
    state_.sticky_counter = 0;
    state_.last_satisfied = false;
    state_.rescan = true;
}

void Agent::on_moved(std::span<const VisibleAp> row)
{
    if (config_.learns()) {
        if (!maybe_reset(state_, row, config_.rssi_change_db)) {
            // Same AP set within the RSSI tolerance: keep the learned rewards.
            for (auto& s : state_.snapshot) {
                for (const auto& v : row) {
                    if (v.ap == s.ap) {
                        s.rssi_dbm = v.rssi_dbm;
                    }
                }
            }
        }
        return;
    }
    state_.snapshot.assign(row.begin(), row.end());
    state_.arms = fresh_arms(row);
    if (!state_.current_ap || state_.arm_of(*state_.current_ap) == AgentState::npos) {
        state_.rescan = true;
    }
}

ApId Agent::decide(std::span<const double> broadcast_loads, ChoiceSource& choice)
{
    ++state_.decisions;
    ApId ap = 0;
    if (state_.rescan || !state_.current_ap || state_.arm_of(*state_.current_ap) == AgentState::npos) {
        ap = ss_decide(state_.snapshot, choice);
        state_.rescan = false;
    } else {
        switch (config_.policy) {
        case Policy::StrongestSignal:
            ap = *state_.current_ap;
            break;
        case Policy::EpsilonGreedy:
            ap = eps_greedy_decide(state_, config_.epsilon_at(state_.decisions), choice);
            break;
        case Policy::EpsilonSticky:
            ap = eps_sticky_decide(state_, config_, config_.epsilon_at(state_.decisions), choice);
            break;
        case Policy::LoadAware:
            ap = load_aware_decide(state_, broadcast_loads, config_.rho, state_.last_satisfied, choice);
            break;
        }
    }
    state_.current_ap = ap;
    return ap;
}

void Agent::observe(double normalized_throughput)
{
    state_.last_satisfied = is_satisfied(normalized_throughput);
    if (!config_.learns() || !state_.current_ap) {
        return;
    }
    const auto i = state_.arm_of(*state_.current_ap);
    if (i != AgentState::npos) {
        update_reward(state_.arms[i], normalized_throughput, config_.reward);
    }
}

} // namespace apsel::agents
