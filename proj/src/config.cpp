#include "apsel/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "apsel/error.hpp"

namespace apsel::config {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Setter = std::function<void(ExperimentConfig&, const json&, const fs::path&)>;
using Getter = std::function<json(const ExperimentConfig&)>;

struct KeyDef {
    KeyInfo info;
    Setter set;
    Getter get;
};

[[noreturn]] void bad(const std::string& key, const std::string& why)
{
    throw ConfigError("config key '" + key + "': " + why);
}

double num(const std::string& key, const json& v)
{
    if (!v.is_number()) {
        bad(key, "expected a number");
    }
    return v.get<double>();
}

std::int64_t integer(const std::string& key, const json& v)
{
    if (!v.is_number_integer()) {
        bad(key, "expected an integer");
    }
    return v.get<std::int64_t>();
}

std::size_t count(const std::string& key, const json& v)
{
    const auto n = integer(key, v);
    if (n < 0) {
        bad(key, "must be non-negative");
    }
    return static_cast<std::size_t>(n);
}

bool flag(const std::string& key, const json& v)
{
    if (!v.is_boolean()) {
        bad(key, "expected true or false");
    }
    return v.get<bool>();
}

std::string text(const std::string& key, const json& v)
{
    if (!v.is_string()) {
        bad(key, "expected a string");
    }
    return v.get<std::string>();
}

template <typename E>
E choose(const std::string& key, const json& v, const std::vector<std::pair<std::string, E>>& options)
{
    const auto s = text(key, v);
    for (const auto& [name, value] : options) {
        if (name == s) {
            return value;
        }
    }
    std::string list;
    for (const auto& o : options) {
        list += (list.empty() ? "" : ", ") + o.first;
    }
    bad(key, "'" + s + "' is not one of " + list);
}

template <typename E>
std::string name_of(E e, const std::vector<std::pair<std::string, E>>& options)
{
    for (const auto& [name, value] : options) {
        if (value == e) {
            return name;
        }
    }
    return "?";
}

const std::vector<std::pair<std::string, scenario::ApPlacement>> kApPlacement{{"grid", scenario::ApPlacement::Grid},
                                                                              {"random", scenario::ApPlacement::Random}};
const std::vector<std::pair<std::string, scenario::StaPlacement>> kStaPlacement{{"uniform", scenario::StaPlacement::Uniform},
                                                                                {"clustered", scenario::StaPlacement::Clustered}};
const std::vector<std::pair<std::string, scenario::ChannelMode>> kChannelMode{
    {"grid_pattern", scenario::ChannelMode::GridPattern}, {"greedy_coloring", scenario::ChannelMode::GreedyColoring}};
const std::vector<std::pair<std::string, scenario::LoadMode>> kLoadMode{{"fixed", scenario::LoadMode::Fixed},
                                                                        {"variable", scenario::LoadMode::Variable}};
const std::vector<std::pair<std::string, agents::EpsilonSchedule>> kSchedule{{"fixed", agents::EpsilonSchedule::Fixed},
                                                                             {"decreasing", agents::EpsilonSchedule::Decreasing}};
const std::vector<std::pair<std::string, agents::RewardStrategy::Kind>> kReward{{"average", agents::RewardStrategy::Kind::Average},
                                                                                {"weighted", agents::RewardStrategy::Kind::Weighted},
                                                                                {"window", agents::RewardStrategy::Kind::Window}};

fs::path resolve(const fs::path& p, const fs::path& base)
{
    if (p.empty() || p.is_absolute() || base.empty()) {
        return p;
    }
    return fs::weakly_canonical(base / p);
}

json sticky_to_json(std::size_t sc)
{
    return sc == agents::kStickForever ? json("forever") : json(sc);
}

std::size_t sticky_from_json(const std::string& key, const json& v)
{
    if (v.is_string() && v.get<std::string>() == "forever") {
        return agents::kStickForever;
    }
    return count(key, v);
}

// Agent keys shared by the global agent and per-STA overrides.
void apply_agent_key(agents::AgentConfig& a, const std::string& key, const json& v)
{
    if (key == "policy") {
        a.policy = agents::parse_policy(text(key, v));
    } else if (key == "epsilon") {
        if (v.is_null()) {
            a.epsilon.reset();
        } else {
            a.epsilon = num(key, v);
        }
    } else if (key == "epsilon_schedule") {
        a.epsilon_schedule = choose(key, v, kSchedule);
    } else if (key == "sticky_counter") {
        a.sticky_max = sticky_from_json(key, v);
    } else if (key == "reward") {
        a.reward.kind = choose(key, v, kReward);
    } else if (key == "reward_window") {
        a.reward.window = count(key, v);
    } else if (key == "rho") {
        a.rho = num(key, v);
    } else if (key == "rssi_change_db") {
        a.rssi_change_db = num(key, v);
    } else {
        throw ConfigError("unknown agent key '" + key + "'");
    }
}

json agent_to_json(const agents::AgentConfig& a)
{
    json j;
    j["policy"] = agents::to_string(a.policy);
    j["epsilon"] = a.epsilon ? json(*a.epsilon) : json(nullptr);
    j["epsilon_schedule"] = name_of(a.epsilon_schedule, kSchedule);
    j["sticky_counter"] = sticky_to_json(a.sticky_max);
    j["reward"] = name_of(a.reward.kind, kReward);
    j["reward_window"] = a.reward.window;
    j["rho"] = a.rho;
    j["rssi_change_db"] = a.rssi_change_db;
    return j;
}

std::vector<KeyDef> build_keys()
{
    std::vector<KeyDef> k;
    auto add = [&](std::string name, std::string help, Setter s, Getter g) { k.push_back({{std::move(name), std::move(help)}, s, g}); };
    using C = ExperimentConfig;
    using P = const fs::path&;

    add("area_width_m", "deployment area width", [](C& c, const json& v, P) { c.sim.area.width = num("area_width_m", v); },
        [](const C& c) { return json(c.sim.area.width); });
    add("area_height_m", "deployment area height", [](C& c, const json& v, P) { c.sim.area.height = num("area_height_m", v); },
        [](const C& c) { return json(c.sim.area.height); });
    add("n_aps", "number of APs", [](C& c, const json& v, P) { c.sim.n_aps = count("n_aps", v); },
        [](const C& c) { return json(c.sim.n_aps); });
    add("ap_placement", "grid | random", [](C& c, const json& v, P) { c.sim.ap_placement = choose("ap_placement", v, kApPlacement); },
        [](const C& c) { return json(name_of(c.sim.ap_placement, kApPlacement)); });
    add("n_stas", "number of STAs", [](C& c, const json& v, P) { c.sim.n_stas = count("n_stas", v); },
        [](const C& c) { return json(c.sim.n_stas); });
    add("sta_placement", "uniform | clustered",
        [](C& c, const json& v, P) { c.sim.sta_placement = choose("sta_placement", v, kStaPlacement); },
        [](const C& c) { return json(name_of(c.sim.sta_placement, kStaPlacement)); });
    add("cluster_size", "STAs per cluster", [](C& c, const json& v, P) { c.sim.cluster_size = static_cast<int>(integer("cluster_size", v)); },
        [](const C& c) { return json(c.sim.cluster_size); });
    add("cluster_box_m", "side of the square cluster box", [](C& c, const json& v, P) { c.sim.cluster_box_m = num("cluster_box_m", v); },
        [](const C& c) { return json(c.sim.cluster_box_m); });
    add("bandwidth_mhz", "20 | 40 | 80", [](C& c, const json& v, P) { c.sim.bandwidth_mhz = static_cast<int>(integer("bandwidth_mhz", v)); },
        [](const C& c) { return json(c.sim.bandwidth_mhz); });
    add("channel_mode", "grid_pattern | greedy_coloring",
        [](C& c, const json& v, P) { c.sim.channel_mode = choose("channel_mode", v, kChannelMode); },
        [](const C& c) { return json(name_of(c.sim.channel_mode, kChannelMode)); });
    add("reuse_factor", "greedy colouring radius in mean nearest-neighbour distances",
        [](C& c, const json& v, P) { c.sim.reuse_factor = num("reuse_factor", v); },
        [](const C& c) { return json(c.sim.reuse_factor); });
    add(
        "deployment_file", "fixed deployment JSON (overrides generated placement)",
        [](C& c, const json& v, P base) {
            c.deployment_file = resolve(text("deployment_file", v), base);
            if (c.deployment_file.empty()) {
                c.sim.deployment.reset();
            } else {
                c.sim.deployment = scenario::load_deployment(c.deployment_file);
            }
        },
        [](const C& c) { return json(c.deployment_file.string()); });

    add("load_mode", "fixed | variable", [](C& c, const json& v, P) { c.sim.load.mode = choose("load_mode", v, kLoadMode); },
        [](const C& c) { return json(name_of(c.sim.load.mode, kLoadMode)); });
    add("load_mbps", "mean demand per STA", [](C& c, const json& v, P) { c.sim.load.mean_mbps = num("load_mbps", v); },
        [](const C& c) { return json(c.sim.load.mean_mbps); });

    const std::pair<const char*, const char*> agent_keys[] = {
        {"policy", "ss | eps_greedy | eps_sticky | load_aware"},
        {"epsilon", "exploration probability; null for the per-policy default"},
        {"epsilon_schedule", "fixed | decreasing (epsilon / sqrt(decision count))"},
        {"sticky_counter", "unsatisfied rounds tolerated after a satisfied one, or \"forever\""},
        {"reward", "average | weighted | window"},
        {"reward_window", "rounds kept by the window reward"},
        {"rho", "load-aware reassociation probability when unsatisfied"},
        {"rssi_change_db", "RSSI change that resets a learning agent after a move"},
    };
    for (const auto& [key, help] : agent_keys) {
        const std::string name = key;
        add(
            name, help,
            [name](C& c, const json& v, P) {
                try {
                    apply_agent_key(c.sim.agent, name, v);
                } catch (const ConfigError& e) {
                    const std::string msg = e.what();
                    if (msg.rfind("config key", 0) == 0) {
                        throw;
                    }
                    bad(name, msg);
                }
            },
            [name](const C& c) { return agent_to_json(c.sim.agent)[name]; });
    }
    add("agent_fraction", "share of STAs running the policy; the rest use ss",
        [](C& c, const json& v, P) { c.sim.agent_fraction = num("agent_fraction", v); },
        [](const C& c) { return json(c.sim.agent_fraction); });
    add(
        "overrides", "list of {\"sta\": id, <agent keys>} per-STA policies",
        [](C& c, const json& v, P) {
            if (!v.is_array()) {
                bad("overrides", "expected a list");
            }
            c.sim.overrides.clear();
            for (const auto& item : v) {
                if (!item.is_object() || !item.contains("sta")) {
                    bad("overrides", "each entry needs an object with 'sta'");
                }
                agents::AgentConfig a = c.sim.agent;
                for (const auto& [key, val] : item.items()) {
                    if (key != "sta") {
                        try {
                            apply_agent_key(a, key, val);
                        } catch (const ConfigError& e) {
                            bad("overrides", e.what());
                        }
                    }
                }
                c.sim.overrides.emplace_back(count("overrides.sta", item["sta"]), a);
            }
        },
        [](const C& c) {
            json arr = json::array();
            for (const auto& [sta, a] : c.sim.overrides) {
                json j = agent_to_json(a);
                j["sta"] = sta;
                arr.push_back(j);
            }
            return arr;
        });

    add("rounds", "association rounds", [](C& c, const json& v, P) { c.sim.rounds = static_cast<int>(integer("rounds", v)); },
        [](const C& c) { return json(c.sim.rounds); });
    add("arrival_window", "STAs arrive uniformly over rounds 1..window (0 or 1: all at round 1)",
        [](C& c, const json& v, P) { c.sim.arrival_window = static_cast<int>(integer("arrival_window", v)); },
        [](const C& c) { return json(c.sim.arrival_window); });
    add(
        "mobility_theta", "per-STA per-round move probability (0 disables)",
        [](C& c, const json& v, P) {
            c.sim.mobility.theta = num("mobility_theta", v);
            c.sim.mobility.enabled = c.sim.mobility.theta > 0.0;
        },
        [](const C& c) { return json(c.sim.mobility.enabled ? c.sim.mobility.theta : 0.0); });

    add("shadowing", "draw per-link shadowing",
        [](C& c, const json& v, P) { c.sim.phy.path_loss.shadowing_enabled = flag("shadowing", v); },
        [](const C& c) { return json(c.sim.phy.path_loss.shadowing_enabled); });
    add("shadow_max_db", "shadowing upper bound", [](C& c, const json& v, P) { c.sim.phy.path_loss.shadow_max_db = num("shadow_max_db", v); },
        [](const C& c) { return json(c.sim.phy.path_loss.shadow_max_db); });
    add("path_loss_l0_db", "loss at 1 m", [](C& c, const json& v, P) { c.sim.phy.path_loss.l0_db = num("path_loss_l0_db", v); },
        [](const C& c) { return json(c.sim.phy.path_loss.l0_db); });
    add("path_loss_gamma", "distance exponent", [](C& c, const json& v, P) { c.sim.phy.path_loss.gamma = num("path_loss_gamma", v); },
        [](const C& c) { return json(c.sim.phy.path_loss.gamma); });
    add("wall_db", "loss per wall", [](C& c, const json& v, P) { c.sim.phy.path_loss.wall_db = num("wall_db", v); },
        [](const C& c) { return json(c.sim.phy.path_loss.wall_db); });
    add("walls_per_m", "average wall density", [](C& c, const json& v, P) { c.sim.phy.path_loss.walls_per_m = num("walls_per_m", v); },
        [](const C& c) { return json(c.sim.phy.path_loss.walls_per_m); });
    add("tx_power_dbm", "AP and STA transmit power", [](C& c, const json& v, P) { c.sim.phy.tx_power_dbm = num("tx_power_dbm", v); },
        [](const C& c) { return json(c.sim.phy.tx_power_dbm); });
    add("sensitivity_dbm", "visibility and coverage threshold",
        [](C& c, const json& v, P) { c.sim.phy.sensitivity_dbm = num("sensitivity_dbm", v); },
        [](const C& c) { return json(c.sim.phy.sensitivity_dbm); });
    add(
        "rate_table_file", "rate table text file (replaces the built-in tables)",
        [](C& c, const json& v, P base) {
            c.rate_table_file = resolve(text("rate_table_file", v), base);
            c.sim.phy.rate_tables = c.rate_table_file.empty() ? phy::builtin_rate_tables() : phy::load_rate_tables(c.rate_table_file);
        },
        [](const C& c) { return json(c.rate_table_file.string()); });

    add("master_seed", "master RNG seed", [](C& c, const json& v, P) { c.master_seed = static_cast<std::uint64_t>(integer("master_seed", v)); },
        [](const C& c) { return json(c.master_seed); });
    add("seeds", "number of seeds (indices 0..seeds-1)", [](C& c, const json& v, P) { c.seeds = count("seeds", v); },
        [](const C& c) { return json(c.seeds); });
    add(
        "seed_list", "explicit seed indices",
        [](C& c, const json& v, P) {
            if (!v.is_array()) {
                bad("seed_list", "expected a list of integers");
            }
            c.seed_list.clear();
            for (const auto& s : v) {
                c.seed_list.push_back(count("seed_list", s));
            }
        },
        [](const C& c) { return json(c.seed_list); });
    add("parallelism", "worker threads (0: all cores)",
        [](C& c, const json& v, P) { c.parallelism = static_cast<unsigned>(count("parallelism", v)); },
        [](const C& c) { return json(c.parallelism); });
    add("trace_seeds", "number of leading seeds whose per-round trace is written",
        [](C& c, const json& v, P) { c.trace_seeds = count("trace_seeds", v); }, [](const C& c) { return json(c.trace_seeds); });
    add("output_dir", "output directory", [](C& c, const json& v, P base) { c.output_dir = resolve(text("output_dir", v), base); },
        [](const C& c) { return json(c.output_dir.string()); });
    return k;
}

const std::vector<KeyDef>& key_defs()
{
    static const std::vector<KeyDef> defs = build_keys();
    return defs;
}

std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

std::vector<std::uint64_t> ExperimentConfig::seed_indices() const
{
    if (!seed_list.empty()) {
        return seed_list;
    }
    std::vector<std::uint64_t> out(seeds);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

void ExperimentConfig::validate() const
{
    if (sim.rounds <= 0) {
        throw ConfigError("config key 'rounds': must be at least 1");
    }
    if (seed_list.empty() && seeds == 0) {
        throw ConfigError("config key 'seeds': must be at least 1");
    }
    sim.validate();
}

const std::vector<KeyInfo>& keys()
{
    static const std::vector<KeyInfo> infos = [] {
        std::vector<KeyInfo> v;
        for (const auto& d : key_defs()) {
            v.push_back(d.info);
        }
        return v;
    }();
    return infos;
}

std::string suggest_key(const std::string& unknown)
{
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& d : key_defs()) {
        const auto dist = edit_distance(unknown, d.info.name);
        if (dist < best_d) {
            best_d = dist;
            best = d.info.name;
        }
    }
    return best_d <= std::max<std::size_t>(2, unknown.size() / 3) ? best : "";
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const json& value, const fs::path& base_dir)
{
    for (const auto& d : key_defs()) {
        if (d.info.name == key) {
            d.set(cfg, value, base_dir);
            return;
        }
    }
    std::string msg = "unknown config key '" + key + "'";
    if (auto s = suggest_key(key); !s.empty()) {
        msg += " (did you mean '" + s + "'?)";
    }
    throw ConfigError(msg);
}

void apply_json(ExperimentConfig& cfg, const json& obj, const fs::path& base_dir)
{
    if (obj.is_null()) {
        return;
    }
    if (!obj.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    // Files are applied before the keys that depend on them (rate tables
    // replace phy defaults, deployments replace generated placement).
    for (const char* first : {"rate_table_file", "deployment_file"}) {
        if (obj.contains(first)) {
            apply_key(cfg, first, obj.at(first), base_dir);
        }
    }
    for (const auto& [key, value] : obj.items()) {
        if (key != "rate_table_file" && key != "deployment_file") {
            apply_key(cfg, key, value, base_dir);
        }
    }
}

json parse_flag_value(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(text);
    }
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string body = buf.str();
    ExperimentConfig cfg;
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) {
        return cfg;
    }
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    apply_json(cfg, j, path.parent_path().empty() ? fs::current_path() : fs::absolute(path.parent_path()));
    return cfg;
}

json to_json(const ExperimentConfig& cfg)
{
    json j = json::object();
    for (const auto& d : key_defs()) {
        j[d.info.name] = d.get(cfg);
    }
    return j;
}

} // namespace apsel::config
