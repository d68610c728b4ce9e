#pragma once

// Randomised invariant checks shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "apsel/engine.hpp"
#include "apsel/metrics.hpp"
#include "apsel/runner.hpp"
#include "scripted_choice.hpp"

namespace apsel::testing {

struct PropertyResult {
    bool ok = true;
    std::size_t cases = 0;
    std::string detail;

    void fail(const std::string& why)
    {
        if (ok) {
            detail = why;
        }
        ok = false;
    }
};

struct SmallInstance {
    scenario::Deployment deployment;
    std::vector<double> loads;
    engine::PhyConfig phy;
    std::vector<double> shadow;
};

inline SmallInstance random_instance(Rng& rng, std::size_t max_aps = 3, std::size_t max_stas = 4)
{
    SmallInstance s;
    auto& d = s.deployment;
    d.area = {60.0, 60.0};
    d.bandwidth_mhz = 20;
    const auto n_aps = 1 + rng.index(max_aps);
    const auto n_stas = 1 + rng.index(max_stas);
    for (std::size_t j = 0; j < n_aps; ++j) {
        d.ap_positions.push_back({rng.uniform(0.0, 60.0), rng.uniform(0.0, 60.0)});
        d.ap_channels.push_back(rng.bernoulli(0.5) ? 36 : 40);
    }
    for (std::size_t i = 0; i < n_stas; ++i) {
        d.sta_positions.push_back({rng.uniform(0.0, 60.0), rng.uniform(0.0, 60.0)});
        s.loads.push_back(static_cast<double>(rng.integer(1, 20)));
    }
    d.sta_loads_mbps = s.loads;
    for (std::size_t k = 0; k < n_aps * n_stas; ++k) {
        s.shadow.push_back(phy::sample_shadowing(rng, s.phy.path_loss));
    }
    return s;
}

// Straight re-derivation of the occupancy / throughput model, independent of
// LinkTable and raw_occupancies.
inline std::vector<double> oracle_normalized(const SmallInstance& s, const std::vector<std::size_t>& assoc)
{
    const auto& d = s.deployment;
    const std::size_t n = d.sta_positions.size();
    const std::size_t m = d.ap_positions.size();
    const auto& table = s.phy.table(d.bandwidth_mhz);
    auto rssi = [&](std::size_t i, std::size_t j) {
        const double dist = std::max(1.0, std::hypot(d.sta_positions[i].x - d.ap_positions[j].x, d.sta_positions[i].y - d.ap_positions[j].y));
        const auto& p = s.phy.path_loss;
        return s.phy.tx_power_dbm - (p.l0_db + 10.0 * p.gamma * std::log10(dist) + p.wall_db * p.walls_per_m * dist + s.shadow[i * m + j]);
    };
    auto airtime = [&](std::size_t i) {
        const double r = rssi(i, assoc[i]);
        const phy::RateEntry* pick = &table.entries().front();
        for (const auto& e : table.entries()) {
            if (e.min_rssi_dbm <= r) {
                pick = &e;
            }
        }
        const auto& t = s.phy.timing;
        const double bps_data = pick->data_rate_bps * t.sigma_us * 1e-6;
        const double bps_ack = pick->legacy_rate_bps * t.sigma_legacy_us * 1e-6;
        const double n_data = std::ceil((t.l_sf_bits + t.l_mh_bits + t.l_frame_bits + t.l_tb_bits) / bps_data - 1e-9);
        const double n_ack = std::ceil((t.l_sf_bits + t.l_ack_bits + t.l_tb_bits) / bps_ack - 1e-9);
        const double frame_us = t.t_phy_he_su_us + n_data * t.sigma_us + t.sifs_us + t.t_phy_legacy_us + n_ack * t.sigma_legacy_us +
                                t.difs_us + t.t_e_us;
        return s.loads[i] * 1e6 / t.l_frame_bits * (t.e_psi_slots * t.t_e_us + frame_us) * 1e-6;
    };
    std::vector<double> occ(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (assoc[i] == engine::kNoAp) {
                continue;
            }
            const bool own = assoc[i] == j;
            const bool heard = d.ap_channels[assoc[i]] == d.ap_channels[j] && rssi(i, j) >= s.phy.sensitivity_dbm;
            if (own || heard) {
                occ[j] += airtime(i);
            }
        }
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (assoc[i] != engine::kNoAp) {
            out[i] = 1.0 / std::max(1.0, occ[assoc[i]]);
        }
    }
    return out;
}

inline engine::LinkTable build_links(const SmallInstance& s)
{
    const auto& d = s.deployment;
    const std::size_t m = d.ap_positions.size();
    engine::LinkTable links(d.sta_positions.size(), m);
    for (std::size_t i = 0; i < d.sta_positions.size(); ++i) {
        links.rebuild_row(i, d.sta_positions[i], d.ap_positions, std::span<const double>(s.shadow).subspan(i * m, m), s.phy,
                          s.phy.table(d.bandwidth_mhz));
    }
    return links;
}

inline std::vector<double> engine_normalized(const SmallInstance& s, const engine::LinkTable& links, const std::vector<std::size_t>& assoc)
{
    const engine::NetworkView net{links, s.deployment.ap_channels, assoc, s.loads, s.phy, s.phy.table(s.deployment.bandwidth_mhz)};
    std::vector<double> out(assoc.size(), 0.0);
    for (std::size_t i = 0; i < assoc.size(); ++i) {
        if (assoc[i] != engine::kNoAp) {
            out[i] = engine::sta_throughput(i, net).normalized;
        }
    }
    return out;
}

/// Enumeration vs independent oracle vs the simulation engine on random small instances.
inline PropertyResult check_bruteforce_agreement(std::uint64_t seed, std::size_t instances)
{
    PropertyResult res;
    Rng rng(seed);
    for (std::size_t k = 0; k < instances && res.ok; ++k) {
        const auto inst = random_instance(rng);
        const auto table = engine::enumerate_associations(inst.deployment, inst.loads, inst.phy, inst.shadow);
        for (const auto& row : table) {
            ++res.cases;
            const auto oracle = oracle_normalized(inst, row.associations);
            for (std::size_t i = 0; i < oracle.size(); ++i) {
                if (std::abs(oracle[i] - row.normalized[i]) > 1e-12) {
                    res.fail("enumeration disagrees with oracle at instance " + std::to_string(k));
                }
            }
        }
        // Drive the engine through many association vectors with pure exploration
        // and match every round against the enumeration.
        engine::SimulationConfig cfg;
        cfg.deployment = inst.deployment;
        cfg.phy = inst.phy;
        cfg.agent.policy = agents::Policy::EpsilonGreedy;
        cfg.agent.epsilon = 1.0;
        cfg.rounds = 12;
        engine::Simulation sim(cfg, seed, k);
        for (int t = 1; t <= cfg.rounds; ++t) {
            const auto rec = sim.run_round(t);
            std::vector<std::size_t> assoc;
            for (const auto& sta : rec.stas) {
                assoc.push_back(sta.ap);
            }
            const SmallInstance seen{inst.deployment, inst.loads, inst.phy, sim.state().shadow_db};
            const auto oracle = oracle_normalized(seen, assoc);
            for (std::size_t i = 0; i < assoc.size(); ++i) {
                ++res.cases;
                if (std::abs(oracle[i] - rec.stas[i].normalized) > 1e-12) {
                    res.fail("engine round disagrees with oracle at instance " + std::to_string(k));
                }
            }
        }
    }
    return res;
}

/// Removing a STA never lowers anybody else's normalized throughput; values stay in (0, 1].
inline PropertyResult check_removal_monotonicity(std::uint64_t seed, std::size_t instances)
{
    PropertyResult res;
    Rng rng(seed);
    for (std::size_t k = 0; k < instances && res.ok; ++k) {
        const auto inst = random_instance(rng, 4, 8);
        const auto links = build_links(inst);
        const std::size_t n = inst.deployment.sta_positions.size();
        std::vector<std::size_t> assoc(n);
        for (auto& a : assoc) {
            a = rng.index(inst.deployment.ap_positions.size());
        }
        const auto before = engine_normalized(inst, links, assoc);
        for (double v : before) {
            if (!(v > 0.0 && v <= 1.0)) {
                res.fail("normalized throughput outside (0, 1]");
            }
        }
        const auto gone = rng.index(n);
        auto reduced = assoc;
        reduced[gone] = engine::kNoAp;
        const auto after = engine_normalized(inst, links, reduced);
        for (std::size_t i = 0; i < n; ++i) {
            ++res.cases;
            if (i != gone && after[i] + 1e-15 < before[i]) {
                res.fail("removing STA " + std::to_string(gone) + " lowered STA " + std::to_string(i));
            }
        }
    }
    return res;
}

/// AP-level invariants: occupancy <= 1 means its STAs are served in full, and
/// served airtime of own STAs never exceeds 1.
inline PropertyResult check_occupancy_invariants(std::uint64_t seed, std::size_t instances)
{
    PropertyResult res;
    Rng rng(seed);
    for (std::size_t k = 0; k < instances && res.ok; ++k) {
        const auto inst = random_instance(rng, 4, 8);
        const auto links = build_links(inst);
        std::vector<std::size_t> assoc(inst.deployment.sta_positions.size());
        for (auto& a : assoc) {
            a = rng.index(inst.deployment.ap_positions.size());
        }
        const engine::NetworkView net{links, inst.deployment.ap_channels, assoc, inst.loads, inst.phy, inst.phy.table(20)};
        const auto occ = engine::raw_occupancies(net);
        for (std::size_t j = 0; j < occ.size(); ++j) {
            ++res.cases;
            if (std::abs(occ[j] - engine::raw_occupancy(j, net)) > 1e-12) {
                res.fail("raw_occupancy and raw_occupancies disagree");
            }
            double served = 0.0;
            for (std::size_t i = 0; i < assoc.size(); ++i) {
                if (assoc[i] == j) {
                    const auto thr = engine::sta_throughput(i, net);
                    served += engine::sta_airtime(net, i) / std::max(1.0, occ[j]);
                    if (occ[j] <= 1.0 && !agents::is_satisfied(thr.normalized)) {
                        res.fail("unsaturated AP left a STA unsatisfied");
                    }
                }
            }
            if (served > 1.0 + 1e-12) {
                res.fail("served airtime above 1 at a saturated AP");
            }
        }
    }
    return res;
}

/// Scaling every aggregate by c > 0 leaves the exploit choice (and tie set) unchanged.
inline PropertyResult check_argmax_scale_invariance(std::uint64_t seed, std::size_t trials)
{
    PropertyResult res;
    Rng rng(seed);
    for (std::size_t k = 0; k < trials && res.ok; ++k) {
        agents::AgentState st;
        const auto n = 1 + rng.index(6);
        for (std::size_t a = 0; a < n; ++a) {
            agents::ArmStats arm;
            arm.ap = a;
            arm.aggregate = static_cast<double>(rng.integer(0, 8)) / 8.0;
            st.arms.push_back(arm);
        }
        auto scaled = st;
        const double c = rng.uniform(0.05, 20.0);
        for (auto& arm : scaled.arms) {
            arm.aggregate *= c;
        }
        for (std::size_t pick = 0; pick < n; ++pick) {
            ScriptedChoice x;
            ScriptedChoice y;
            x.flips = {false};
            y.flips = {false};
            x.picks = {pick, pick};
            y.picks = {pick, pick};
            try {
                ++res.cases;
                if (agents::eps_greedy_decide(st, 0.0, x) != agents::eps_greedy_decide(scaled, 0.0, y) || x.picks_used != y.picks_used) {
                    res.fail("exploit choice changed under scaling");
                }
            } catch (const std::logic_error&) {
                // pick outside the tie set: both sides must reject it
                ScriptedChoice y2;
                y2.flips = {false};
                y2.picks = {pick};
                bool threw = false;
                try {
                    agents::eps_greedy_decide(scaled, 0.0, y2);
                } catch (const std::logic_error&) {
                    threw = true;
                }
                if (!threw) {
                    res.fail("tie set changed under scaling");
                }
            }
        }
    }
    return res;
}

/// ECDF: sorted strictly increasing values, fractions non-decreasing in (0, 1], ending at 1.
inline PropertyResult check_ecdf_validity(std::uint64_t seed, std::size_t trials)
{
    PropertyResult res;
    Rng rng(seed);
    for (std::size_t k = 0; k < trials && res.ok; ++k) {
        std::vector<double> v(1 + rng.index(200));
        for (auto& x : v) {
            x = rng.bernoulli(0.3) ? 1.0 : static_cast<double>(rng.integer(1, 20)) / 20.0;
        }
        const auto cdf = metrics::ecdf(v);
        ++res.cases;
        if (cdf.empty() || std::abs(cdf.back().fraction - 1.0) > 1e-15) {
            res.fail("ecdf does not reach 1");
        }
        for (std::size_t i = 0; i < cdf.size(); ++i) {
            if (!(cdf[i].fraction > 0.0 && cdf[i].fraction <= 1.0)) {
                res.fail("ecdf fraction outside (0, 1]");
            }
            if (i > 0 && (cdf[i].value <= cdf[i - 1].value || cdf[i].fraction < cdf[i - 1].fraction)) {
                res.fail("ecdf not monotone");
            }
            const auto below = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x <= cdf[i].value; }));
            if (std::abs(below / static_cast<double>(v.size()) - cdf[i].fraction) > 1e-12) {
                res.fail("ecdf fraction does not match the sample");
            }
        }
    }
    return res;
}

inline bool same_report(const metrics::Report& a, const metrics::Report& b)
{
    auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] == y[i] || (std::isnan(x[i]) && std::isnan(y[i])))) {
                return false;
            }
        }
        return true;
    };
    return same(a.mean_per_round, b.mean_per_round) && same(a.agent_mean_per_round, b.agent_mean_per_round) &&
           same(a.pooled_final, b.pooled_final) && same(a.seed_final_means, b.seed_final_means) &&
           a.seed_reassociations == b.seed_reassociations && a.seed_indices == b.seed_indices;
}

/// Seed results do not depend on the number of worker threads.
inline PropertyResult check_parallel_determinism(const config::ExperimentConfig& cfg)
{
    PropertyResult res;
    const auto one = runner::run_seeds(cfg, 1);
    for (unsigned p : {2u, 3u, 8u}) {
        ++res.cases;
        if (!same_report(one.report, runner::run_seeds(cfg, p).report)) {
            res.fail("report differs at parallelism " + std::to_string(p));
        }
    }
    return res;
}

} // namespace apsel::testing
