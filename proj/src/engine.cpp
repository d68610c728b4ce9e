#include "apsel/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "apsel/error.hpp"

namespace apsel::engine {

const phy::RateTable& PhyConfig::table(int bandwidth_mhz) const
{
    auto it = rate_tables.find(bandwidth_mhz);
    if (it == rate_tables.end()) {
        throw ConfigError("no rate table for " + std::to_string(bandwidth_mhz) + " MHz");
    }
    return it->second;
}

void PhyConfig::validate(int bandwidth_mhz) const
{
    path_loss.validate();
    timing.validate();
    if (!std::isfinite(tx_power_dbm) || !std::isfinite(sensitivity_dbm)) {
        throw ConfigError("transmit power and sensitivity must be finite");
    }
    if (table(bandwidth_mhz).empty()) {
        throw ConfigError("rate table for " + std::to_string(bandwidth_mhz) + " MHz is empty");
    }
}

void LinkTable::rebuild_row(std::size_t sta, const scenario::Point& sta_pos, const std::vector<scenario::Point>& aps,
                            std::span<const double> shadow_db, const PhyConfig& phy, const phy::RateTable& table)
{
    for (ApId ap = 0; ap < aps.size(); ++ap) {
        Link& l = at(sta, ap);
        const double shadow = shadow_db.empty() ? 0.0 : shadow_db[ap];
        l.path_loss_db = phy::path_loss(scenario::distance(sta_pos, aps[ap]), phy.path_loss, shadow);
        l.rssi_dbm = phy.tx_power_dbm - l.path_loss_db;
        l.rates = phy::select_rates(l.rssi_dbm, table);
        l.in_coverage = l.rssi_dbm >= phy.sensitivity_dbm;
        l.visible = l.in_coverage && l.rates.has_value();
    }
}

std::vector<agents::VisibleAp> LinkTable::visibility(std::size_t sta) const
{
    std::vector<agents::VisibleAp> row;
    for (ApId ap = 0; ap < n_aps_; ++ap) {
        const Link& l = at(sta, ap);
        if (l.visible) {
            row.push_back({ap, l.rssi_dbm});
        }
    }
    return row;
}

ApId LinkTable::strongest(std::size_t sta) const
{
    ApId best = 0;
    for (ApId ap = 1; ap < n_aps_; ++ap) {
        if (at(sta, ap).rssi_dbm > at(sta, best).rssi_dbm) {
            best = ap;
        }
    }
    return best;
}

phy::Rates serving_rates(const NetworkView& net, std::size_t sta)
{
    const ApId ap = net.associations[sta];
    const auto& rates = net.links.at(sta, ap).rates;
    if (rates) {
        return *rates;
    }
    const auto& low = net.table.lowest();
    return {low.data_rate_bps, low.legacy_rate_bps};
}

double sta_airtime(const NetworkView& net, std::size_t sta)
{
    return phy::required_airtime(net.loads_mbps[sta] * 1e6, net.phy.timing.l_frame_bits, serving_rates(net, sta), net.phy.timing);
}

double raw_occupancy(ApId ap, const NetworkView& net)
{
    if (ap >= net.links.n_aps()) {
        throw ContractViolation("raw_occupancy: unknown AP " + std::to_string(ap));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < net.associations.size(); ++i) {
        const ApId serving = net.associations[i];
        if (serving == kNoAp) {
            continue;
        }
        const bool own = serving == ap;
        const bool foreign = !own && net.ap_channels[serving] == net.ap_channels[ap] && net.links.at(i, ap).in_coverage;
        if (own || foreign) {
            total += sta_airtime(net, i);
        }
    }
    return total;
}

std::vector<double> raw_occupancies(const NetworkView& net)
{
    const std::size_t n_aps = net.links.n_aps();
    std::vector<double> occ(n_aps, 0.0);
    for (std::size_t i = 0; i < net.associations.size(); ++i) {
        const ApId serving = net.associations[i];
        if (serving == kNoAp) {
            continue;
        }
        const double u = sta_airtime(net, i);
        occ[serving] += u;
        for (ApId j = 0; j < n_aps; ++j) {
            if (j != serving && net.ap_channels[j] == net.ap_channels[serving] && net.links.at(i, j).in_coverage) {
                occ[j] += u;
            }
        }
    }
    return occ;
}

Throughput sta_throughput(std::size_t sta, const NetworkView& net)
{
    const ApId ap = net.associations[sta];
    if (ap == kNoAp) {
        throw ContractViolation("sta_throughput: STA " + std::to_string(sta) + " is not active");
    }
    const double scale = std::max(1.0, raw_occupancy(ap, net));
    return {net.loads_mbps[sta] / scale, 1.0 / scale};
}

void SimulationConfig::validate() const
{
    int bw = bandwidth_mhz;
    std::size_t stas = n_stas;
    if (deployment) {
        deployment->validate();
        bw = deployment->bandwidth_mhz;
        stas = deployment->sta_positions.size();
        if (mobility.enabled && mobility.theta > 0.0 && !deployment->clustered()) {
            throw ConfigError("mobility requires a clustered deployment");
        }
    } else {
        if (n_aps == 0) {
            throw ConfigError("need at least one AP");
        }
        if (!(area.width > 0.0) || !(area.height > 0.0)) {
            throw ConfigError("area must be positive");
        }
        if (sta_placement == scenario::StaPlacement::Clustered && cluster_size <= 0) {
            throw ConfigError("cluster size must be positive");
        }
        if (ap_placement == scenario::ApPlacement::Grid) {
            const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_aps))));
            if (side * side != n_aps) {
                throw ConfigError("grid AP placement needs a perfect-square AP count, got " + std::to_string(n_aps));
            }
        }
        if (mobility.enabled && mobility.theta > 0.0 && sta_placement != scenario::StaPlacement::Clustered) {
            throw ConfigError("mobility requires clustered STA placement");
        }
    }
    (void)scenario::channel_set(bw);
    phy.validate(bw);
    load.validate();
    mobility.validate();
    agent.validate();
    for (const auto& [sta, cfg] : overrides) {
        if (sta >= stas) {
            throw ConfigError("override refers to STA " + std::to_string(sta) + " but only " + std::to_string(stas) + " exist");
        }
        cfg.validate();
    }
    if (!(agent_fraction >= 0.0 && agent_fraction <= 1.0)) {
        throw ConfigError("agent fraction must lie in [0, 1]");
    }
    if (rounds < 0) {
        throw ConfigError("rounds must be non-negative");
    }
    if (arrival_window < 0) {
        throw ConfigError("arrival window must be non-negative");
    }
}

scenario::Deployment build_deployment(const SimulationConfig& config, std::uint64_t master_seed, std::uint64_t seed_index)
{
    if (config.deployment) {
        return *config.deployment;
    }
    Rng rng = Rng::derive(master_seed, seed_index, Stream::Placement);
    scenario::Deployment d;
    d.area = config.area;
    d.bandwidth_mhz = config.bandwidth_mhz;
    d.cluster_box_m = config.cluster_box_m;
    d.ap_positions = scenario::place_aps(config.n_aps, config.area, config.ap_placement, rng);
    auto layout = scenario::place_stas(config.n_stas, config.area, config.sta_placement, config.cluster_size, rng, config.cluster_box_m);
    d.sta_positions = std::move(layout.positions);
    d.cluster_centers = std::move(layout.cluster_centers);
    d.sta_cluster = std::move(layout.membership);
    d.ap_channels = scenario::allocate_channels(d.ap_positions, scenario::channel_set(d.bandwidth_mhz), config.channel_mode, 0.0,
                                                config.reuse_factor);
    return d;
}

Simulation::Simulation(const SimulationConfig& config, std::uint64_t master_seed, std::uint64_t seed_index, ChoiceFactory choices)
    : config_(config),
      loads_rng_(Rng::derive(master_seed, seed_index, Stream::Loads)),
      mobility_rng_(Rng::derive(master_seed, seed_index, Stream::Mobility)),
      order_rng_(Rng::derive(master_seed, seed_index, Stream::Order))
{
    config_.validate();
    state_.deployment = build_deployment(config_, master_seed, seed_index);
    const auto& dep = state_.deployment;
    table_ = &config_.phy.table(dep.bandwidth_mhz);
    const std::size_t n = dep.sta_positions.size();
    const std::size_t m = dep.ap_positions.size();

    Rng shadow_rng = Rng::derive(master_seed, seed_index, Stream::Shadowing);
    state_.shadow_db.resize(n * m);
    for (auto& s : state_.shadow_db) {
        s = phy::sample_shadowing(shadow_rng, config_.phy.path_loss);
    }
    state_.links = LinkTable(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        rebuild_links(i);
    }

    if (config_.arrival_window > 1) {
        Rng arrivals = Rng::derive(master_seed, seed_index, Stream::Arrivals);
        state_.arrival_round = scenario::sample_arrivals(n, config_.arrival_window, arrivals).arrival_round;
    } else {
        state_.arrival_round.assign(n, 1);
    }

    // Roles: a random subset of round(fraction * n) STAs runs the configured
    // policy, the rest use strongest signal.
    std::vector<agents::AgentConfig> roles(n, config_.agent);
    if (config_.agent_fraction < 1.0) {
        agents::AgentConfig ss = config_.agent;
        ss.policy = agents::Policy::StrongestSignal;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng roles_rng = Rng::derive(master_seed, seed_index, Stream::Roles);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(roles_rng.index(i))]);
        }
        const auto n_agents = static_cast<std::size_t>(std::llround(config_.agent_fraction * static_cast<double>(n)));
        for (std::size_t k = n_agents; k < n; ++k) {
            roles[order[k]] = ss;
        }
    }
    for (const auto& [sta, cfg] : config_.overrides) {
        roles[sta] = cfg;
    }
    state_.agents.reserve(n);
    for (auto& cfg : roles) {
        state_.agents.emplace_back(std::move(cfg));
    }

    choices_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (choices) {
            choices_.push_back(choices(i));
        } else {
            choices_.push_back(std::make_unique<agents::RngChoice>(Rng::derive(master_seed, seed_index, Stream::Agents, i + 1)));
        }
    }

    state_.associations.assign(n, kNoAp);
    state_.loads_mbps.assign(n, 0.0);
    state_.active.assign(n, false);
    state_.satisfied.assign(n, false);
}

void Simulation::rebuild_links(std::size_t sta)
{
    const auto& dep = state_.deployment;
    const std::size_t m = dep.ap_positions.size();
    std::span<const double> shadows(state_.shadow_db.data() + sta * m, m);
    state_.links.rebuild_row(sta, dep.sta_positions[sta], dep.ap_positions, shadows, config_.phy, *table_);
}

NetworkView Simulation::view() const
{
    return NetworkView{state_.links, state_.deployment.ap_channels, state_.associations, state_.loads_mbps, config_.phy, *table_};
}

RoundRecord Simulation::run_round(int round_index)
{
    if (round_index != last_round_ + 1) {
        throw ContractViolation("run_round: rounds must be consecutive starting at 1");
    }
    last_round_ = round_index;
    auto& st = state_;
    auto& dep = st.deployment;
    const std::size_t n = dep.sta_positions.size();
    const std::size_t m = dep.ap_positions.size();

    const std::vector<ApId> prev_assoc = st.associations;
    const std::vector<bool> prev_active = st.active;

    // (1) arrivals
    for (std::size_t i = 0; i < n; ++i) {
        if (!st.active[i] && st.arrival_round[i] <= round_index) {
            st.active[i] = true;
            st.agents[i].activate(st.links.visibility(i));
        }
    }

    // (2) mobility
    if (config_.mobility.enabled && config_.mobility.theta > 0.0 && round_index > 1) {
        auto step = scenario::apply_mobility(dep.sta_positions, dep.cluster_centers, dep.sta_cluster, config_.mobility.theta,
                                             mobility_rng_, dep.cluster_box_m);
        dep.sta_positions = std::move(step.positions);
        dep.sta_cluster = std::move(step.membership);
        for (std::size_t i : step.moved) {
            rebuild_links(i);
            if (st.active[i]) {
                st.agents[i].on_moved(st.links.visibility(i));
            }
        }
    }

    // (3) demand
    if (!dep.sta_loads_mbps.empty()) {
        st.loads_mbps = dep.sta_loads_mbps;
    } else {
        st.loads_mbps = scenario::sample_round_loads(config_.load, n, loads_rng_);
    }

    // (4) decisions
    std::vector<double> broadcast(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (st.active[i] && prev_assoc[i] != kNoAp) {
            broadcast[prev_assoc[i]] += st.loads_mbps[i];
        }
    }
    std::vector<ApId> next(n, kNoAp);
    std::vector<bool> out_of_range(n, false);
    std::vector<std::size_t> sequential;
    for (std::size_t i = 0; i < n; ++i) {
        if (!st.active[i]) {
            continue;
        }
        auto& agent = st.agents[i];
        if (agent.state().snapshot.empty()) {
            next[i] = st.links.strongest(i);
            out_of_range[i] = true;
            continue;
        }
        if (agent.config().policy == agents::Policy::LoadAware) {
            sequential.push_back(i);
            continue;
        }
        next[i] = agent.decide({}, *choices_[i]);
    }
    for (std::size_t k = sequential.size(); k > 1; --k) {
        std::swap(sequential[k - 1], sequential[static_cast<std::size_t>(order_rng_.index(k))]);
    }
    std::vector<double> visible_loads;
    for (std::size_t i : sequential) {
        auto& agent = st.agents[i];
        visible_loads.clear();
        for (const auto& v : agent.state().snapshot) {
            visible_loads.push_back(broadcast[v.ap]);
        }
        const ApId ap = agent.decide(visible_loads, *choices_[i]);
        const ApId before = prev_active[i] ? prev_assoc[i] : kNoAp;
        if (ap != before) {
            if (before != kNoAp) {
                broadcast[before] -= st.loads_mbps[i];
            }
            broadcast[ap] += st.loads_mbps[i];
        }
        next[i] = ap;
    }
    st.associations = std::move(next);

    // (5) occupancy and throughput
    const NetworkView net = view();
    const auto occ = raw_occupancies(net);

    RoundRecord rec;
    rec.round = round_index;
    rec.stas.resize(n);
    rec.aps.resize(m);
    for (ApId j = 0; j < m; ++j) {
        rec.aps[j].raw_occupancy = occ[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = rec.stas[i];
        s.agent = st.agents[i].config().policy != agents::Policy::StrongestSignal;
        s.load_mbps = st.loads_mbps[i];
        if (!st.active[i]) {
            st.satisfied[i] = false;
            continue;
        }
        const ApId ap = st.associations[i];
        const double scale = std::max(1.0, occ[ap]);
        s.active = true;
        s.ap = ap;
        s.throughput_mbps = st.loads_mbps[i] / scale;
        s.normalized = 1.0 / scale;
        s.satisfied = agents::is_satisfied(s.normalized);
        s.out_of_range = out_of_range[i];
        s.reassociated = prev_active[i] && prev_assoc[i] != kNoAp && prev_assoc[i] != ap;
        st.satisfied[i] = s.satisfied;
        rec.aps[ap].offered_load_mbps += st.loads_mbps[i];

        // (6) reward
        if (!out_of_range[i]) {
            st.agents[i].observe(s.normalized);
        }
    }
    return rec;
}

SimulationResult run_simulation(const SimulationConfig& config, std::uint64_t master_seed, std::uint64_t seed_index)
{
    Simulation sim(config, master_seed, seed_index);
    SimulationResult result;
    result.deployment = sim.state().deployment;
    result.trace.reserve(static_cast<std::size_t>(config.rounds));
    for (int t = 1; t <= config.rounds; ++t) {
        result.trace.push_back(sim.run_round(t));
    }
    for (const auto& a : sim.state().agents) {
        result.final_agents.push_back(a.state());
    }
    return result;
}

std::vector<AssignmentOutcome> enumerate_associations(const scenario::Deployment& deployment, std::span<const double> loads_mbps,
                                                      const PhyConfig& phy, std::span<const double> shadow_db)
{
    deployment.validate();
    const std::size_t n = deployment.sta_positions.size();
    const std::size_t m = deployment.ap_positions.size();
    if (loads_mbps.size() != n) {
        throw ConfigError("enumerate: need one load per STA");
    }
    const auto& table = phy.table(deployment.bandwidth_mhz);
    LinkTable links(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> row = shadow_db.empty() ? std::span<const double>{} : shadow_db.subspan(i * m, m);
        links.rebuild_row(i, deployment.sta_positions[i], deployment.ap_positions, row, phy, table);
    }
    std::vector<std::vector<ApId>> options(n);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& v : links.visibility(i)) {
            options[i].push_back(v.ap);
        }
        if (options[i].empty()) {
            options[i].resize(m);
            std::iota(options[i].begin(), options[i].end(), 0);
        }
        total *= options[i].size();
        if (total > 1'000'000) {
            throw ConfigError("enumerate: too many association vectors (limit 1e6)");
        }
    }

    std::vector<AssignmentOutcome> out;
    out.reserve(total);
    std::vector<std::size_t> digit(n, 0);
    std::vector<ApId> assoc(n);
    for (std::size_t k = 0; k < total; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            assoc[i] = options[i][digit[i]];
        }
        const NetworkView net{links, deployment.ap_channels, assoc, loads_mbps, phy, table};
        const auto occ = raw_occupancies(net);
        AssignmentOutcome o;
        o.associations = assoc;
        o.all_satisfied = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = sta_airtime(net, i);
            const double scale = std::max(1.0, occ[assoc[i]]);
            o.airtime.push_back(u);
            o.served_airtime.push_back(u / scale);
            o.throughput_mbps.push_back(loads_mbps[i] / scale);
            o.normalized.push_back(1.0 / scale);
            o.all_satisfied = o.all_satisfied && agents::is_satisfied(1.0 / scale);
        }
        out.push_back(std::move(o));
        // Mixed-radix increment; STA 0 varies slowest.
        for (std::size_t i = n; i-- > 0;) {
            if (++digit[i] < options[i].size()) {
                break;
            }
            digit[i] = 0;
        }
    }
    return out;
}

} // namespace apsel::engine
