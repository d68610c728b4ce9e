#include "apsel/presets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "apsel/error.hpp"
#include "apsel/io.hpp"

namespace apsel::presets {

namespace fs = std::filesystem;
using nlohmann::json;
using agents::Policy;

namespace {

config::ExperimentConfig with_policy(config::ExperimentConfig c, Policy p, std::optional<double> eps = std::nullopt)
{
    c.sim.agent.policy = p;
    c.sim.agent.epsilon = eps;
    return c;
}

std::string pct(double x)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%g%%", x * 100.0);
    return buf;
}

std::string eps_label(double e)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%g", e);
    return buf;
}

// ss / eps_greedy / eps_sticky, the usual three arms.
void add_trio(std::vector<Arm>& arms, const config::ExperimentConfig& c, const std::string& prefix, std::optional<double> greedy_eps,
              std::optional<double> sticky_eps)
{
    arms.push_back({prefix + "ss", with_policy(c, Policy::StrongestSignal)});
    arms.push_back({prefix + "eps_greedy", with_policy(c, Policy::EpsilonGreedy, greedy_eps)});
    arms.push_back({prefix + "eps_sticky", with_policy(c, Policy::EpsilonSticky, sticky_eps)});
}

config::ExperimentConfig variable(config::ExperimentConfig c)
{
    c.sim.load.mode = scenario::LoadMode::Variable;
    return c;
}

using Builder = std::function<Preset(const config::ExperimentConfig&)>;

const std::map<std::string, Builder>& builders()
{
    static const std::map<std::string, Builder> b{
        {"toy",
         [](const config::ExperimentConfig& c) {
             Preset p{"toy", "two APs, two STAs: exhaustive association table and short policy runs", {}};
             p.arms.push_back({"ss", with_policy(c, Policy::StrongestSignal)});
             p.arms.push_back({"eps_greedy", with_policy(c, Policy::EpsilonGreedy, 0.3)});
             p.arms.push_back({"eps_sticky", with_policy(c, Policy::EpsilonSticky, 0.3)});
             return p;
         }},
        {"fig4-grid-clusters",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig4-grid-clusters", "grid APs, clustered STAs, fixed load: ss vs eps_greedy vs eps_sticky (epsilon 0.1)", {}};
             add_trio(p.arms, base, "", 0.1, 0.1);
             return p;
         }},
        {"fig6-bonding",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig6-bonding", "20, 40 and 80 MHz channel plans", {}};
             for (int bw : {20, 40, 80}) {
                 auto c = base;
                 c.sim.bandwidth_mhz = bw;
                 add_trio(p.arms, c, std::to_string(bw) + "MHz/", 0.1, 0.1);
             }
             return p;
         }},
        {"fig9-epsilon-sweep",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig9-epsilon-sweep", "variable load; fixed epsilon values and a decreasing schedule", {}};
             const auto c = variable(base);
             p.arms.push_back({"ss", with_policy(c, Policy::StrongestSignal)});
             for (Policy pol : {Policy::EpsilonGreedy, Policy::EpsilonSticky}) {
                 for (double e : {0.05, 0.1, 0.25, 0.5, 0.75}) {
                     p.arms.push_back({agents::to_string(pol) + "@" + eps_label(e), with_policy(c, pol, e)});
                 }
                 auto d = with_policy(c, pol);
                 d.sim.agent.epsilon_schedule = agents::EpsilonSchedule::Decreasing;
                 p.arms.push_back({agents::to_string(pol) + "@decreasing", d});
             }
             return p;
         }},
        {"fig12-agent-fraction",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig12-agent-fraction", "variable load; share of agent-enabled STAs, the rest use ss", {}};
             const auto c = variable(base);
             p.arms.push_back({"ss", with_policy(c, Policy::StrongestSignal)});
             for (Policy pol : {Policy::EpsilonGreedy, Policy::EpsilonSticky}) {
                 for (double f : {0.05, 0.2, 0.5, 1.0}) {
                     auto a = with_policy(c, pol);
                     a.sim.agent_fraction = f;
                     p.arms.push_back({agents::to_string(pol) + "@" + pct(f), a});
                 }
             }
             return p;
         }},
        {"fig13-arrivals",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig13-arrivals", "variable load; STAs arrive uniformly over the first 60 rounds", {}};
             auto c = variable(base);
             c.sim.arrival_window = 60;
             add_trio(p.arms, c, "", std::nullopt, std::nullopt);
             return p;
         }},
        {"fig14-mobility",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig14-mobility", "variable load; each STA moves to a random cluster with probability 2/64 per round", {}};
             auto c = variable(base);
             c.sim.mobility.enabled = true;
             c.sim.mobility.theta = 2.0 / 64.0;
             add_trio(p.arms, c, "", std::nullopt, std::nullopt);
             return p;
         }},
        {"fig17-load-aware",
         [](const config::ExperimentConfig& base) {
             Preset p{"fig17-load-aware", "load-aware reassociation vs the bandit policies, fixed and variable load", {}};
             for (bool var : {false, true}) {
                 const auto c = var ? variable(base) : base;
                 const std::string prefix = var ? "variable/" : "static/";
                 add_trio(p.arms, c, prefix, std::nullopt, std::nullopt);
                 for (double rho : {0.015, 0.03, 0.06}) {
                     auto a = with_policy(c, Policy::LoadAware);
                     a.sim.agent.rho = rho;
                     p.arms.push_back({prefix + "load_aware@" + pct(rho), a});
                 }
             }
             return p;
         }},
    };
    return b;
}

} // namespace

config::ExperimentConfig scenario_defaults()
{
    config::ExperimentConfig c;
    c.sim.phy.tx_power_dbm = 26.0;
    return c;
}

config::ExperimentConfig toy_config()
{
    config::ExperimentConfig c;
    scenario::Deployment d;
    d.area = {50.0, 30.0};
    d.bandwidth_mhz = 20;
    d.ap_positions = {{10.0, 10.0}, {40.0, 10.0}};
    d.ap_channels = {36, 40};
    d.sta_positions = {{10.0, 22.0}, {16.0, 10.0}};
    d.sta_loads_mbps = {12.0, 15.0};
    c.sim.deployment = d;
    c.sim.phy.path_loss.shadowing_enabled = false;
    c.sim.phy.path_loss.walls_per_m = 0.1;
    c.sim.phy.tx_power_dbm = 20.0;
    c.sim.phy.sensitivity_dbm = -90.0;
    c.sim.phy.rate_tables = {{20, phy::RateTable({{-90.0, 15e6, 6e6}, {-78.0, 21.5e6, 24e6}, {-58.0, 29e6, 24e6}})}};
    c.seeds = 1;
    c.sim.rounds = 12;
    c.sim.agent.sticky_max = 2;
    return c;
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& [name, _] : builders()) {
        names.push_back(name);
    }
    return names;
}

Preset make_preset(const std::string& name, const config::ExperimentConfig& base)
{
    const auto it = builders().find(name);
    if (it == builders().end()) {
        std::string list;
        for (const auto& n : preset_names()) {
            list += (list.empty() ? "" : ", ") + n;
        }
        throw ConfigError("unknown preset '" + name + "'; available: " + list);
    }
    return it->second(base);
}

Preset make_preset(const std::string& name)
{
    return make_preset(name, name == "toy" ? toy_config() : scenario_defaults());
}

const ArmResult& PresetResult::arm(const std::string& label) const
{
    for (const auto& a : arms) {
        if (a.label == label) {
            return a;
        }
    }
    throw InvalidInput("preset " + name + " has no arm '" + label + "'");
}

PresetResult run_preset(const Preset& preset, unsigned parallelism)
{
    for (const auto& a : preset.arms) {
        a.cfg.validate();
    }
    PresetResult out;
    out.name = preset.name;
    for (const auto& a : preset.arms) {
        out.arms.push_back({a.label, a.cfg, runner::run_seeds(a.cfg, parallelism)});
    }
    if (preset.name == "toy") {
        out.enumeration = enumerate(preset.arms.front().cfg);
    }
    return out;
}

json comparisons(const PresetResult& result)
{
    json arms = json::object();
    std::map<std::string, double> ss_mean;
    auto group_of = [](const std::string& label) {
        const auto slash = label.rfind('/');
        return slash == std::string::npos ? std::string() : label.substr(0, slash + 1);
    };
    for (const auto& a : result.arms) {
        if (a.label == group_of(a.label) + "ss") {
            ss_mean[group_of(a.label)] = a.run.report.final_mean;
        }
    }
    for (const auto& a : result.arms) {
        json j = io::report_to_json(a.run.report);
        if (auto it = ss_mean.find(group_of(a.label)); it != ss_mean.end()) {
            j["gain_over_ss"] = a.run.report.final_mean - it->second;
        }
        arms[a.label] = j;
    }
    json out;
    out["preset"] = result.name;
    out["arms"] = arms;
    json ratios = json::object();
    for (const auto& a : result.arms) {
        const auto g = group_of(a.label);
        if (a.label == g + "eps_greedy") {
            for (const auto& b : result.arms) {
                if (b.label == g + "eps_sticky") {
                    const double r = metrics::reassociation_ratio(a.run.report, b.run.report);
                    ratios[g + "eps_greedy/eps_sticky"] = std::isfinite(r) ? json(r) : json(nullptr);
                }
            }
        }
    }
    out["reassociation_ratios"] = ratios;
    return out;
}

std::vector<engine::AssignmentOutcome> enumerate(const config::ExperimentConfig& cfg)
{
    if (!cfg.sim.deployment) {
        throw ConfigError("enumerate needs a fixed deployment (deployment_file)");
    }
    const auto& d = *cfg.sim.deployment;
    std::vector<double> loads = d.sta_loads_mbps;
    if (loads.empty()) {
        loads.assign(d.sta_positions.size(), cfg.sim.load.mean_mbps);
    }
    cfg.sim.phy.validate(d.bandwidth_mhz);
    std::vector<double> shadow;
    if (cfg.sim.phy.path_loss.shadowing_enabled) {
        // Same shadowing draws as the simulation of seed 0.
        Rng rng = Rng::derive(cfg.master_seed, cfg.seed_indices().front(), Stream::Shadowing);
        shadow.resize(d.sta_positions.size() * d.ap_positions.size());
        for (auto& s : shadow) {
            s = phy::sample_shadowing(rng, cfg.sim.phy.path_loss);
        }
    }
    return engine::enumerate_associations(d, loads, cfg.sim.phy, shadow);
}

std::string enumeration_csv(const std::vector<engine::AssignmentOutcome>& table, std::span<const double> loads_mbps)
{
    std::ostringstream out;
    out << "assignment,sta_id,ap_id,load_mbps,airtime,served_airtime,throughput_mbps,normalized_throughput,all_satisfied\n";
    char buf[256];
    for (std::size_t k = 0; k < table.size(); ++k) {
        const auto& row = table[k];
        for (std::size_t i = 0; i < row.associations.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.6g,%.6f,%.6f,%.6f,%.6f,%d\n", k, i, row.associations[i],
                          i < loads_mbps.size() ? loads_mbps[i] : 0.0, row.airtime[i], row.served_airtime[i], row.throughput_mbps[i],
                          row.normalized[i], int(row.all_satisfied));
            out << buf;
        }
    }
    return out.str();
}

void write_preset(const fs::path& dir, const PresetResult& result)
{
    fs::create_directories(dir);
    for (const auto& a : result.arms) {
        fs::path sub = dir;
        std::string safe = a.label;
        for (char& ch : safe) {
            if (ch == '/' || ch == '@' || ch == '%') {
                ch = ch == '%' ? 'p' : '_';
            }
        }
        sub /= safe;
        json extra;
        extra["label"] = a.label;
        extra["config"] = config::to_json(a.cfg);
        io::write_report(sub, a.run.report, extra);
    }
    io::write_json(dir / "comparisons.json", comparisons(result));
    if (!result.enumeration.empty()) {
        const auto& d = *result.arms.front().cfg.sim.deployment;
        std::ofstream(dir / "enumeration.csv") << enumeration_csv(result.enumeration, d.sta_loads_mbps);
    }
}

} // namespace apsel::presets
