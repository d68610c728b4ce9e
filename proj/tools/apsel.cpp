// apsel command-line front end: run, preset, enumerate, validate.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "apsel/config.hpp"
#include "apsel/error.hpp"
#include "apsel/io.hpp"
#include "apsel/presets.hpp"
#include "apsel/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace apsel;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd)
    {
        for (const auto& k : config::keys()) {
            cmd->add_option_function<std::string>(
                "--" + k.name, [this, name = k.name](const std::string& v) { values[name] = v; }, k.help);
        }
    }

    json as_json() const
    {
        json j = json::object();
        for (const auto& [k, v] : values) {
            j[k] = config::parse_flag_value(v);
        }
        return j;
    }

    void apply(config::ExperimentConfig& cfg) const { config::apply_json(cfg, as_json(), fs::current_path()); }
};

fs::path output_dir_for(const config::ExperimentConfig& cfg, const std::string& default_name)
{
    if (!cfg.output_dir.empty()) {
        return cfg.output_dir;
    }
    const char* root = std::getenv("APSEL_OUTPUT_ROOT");
    return fs::path(root && *root ? root : "apsel-out") / default_name;
}

void write_traces(const fs::path& dir, const runner::RunResult& run)
{
    if (run.traces.empty()) {
        return;
    }
    fs::create_directories(dir / "traces");
    for (const auto& [seed, trace] : run.traces) {
        const auto& dep = run.deployments.at(seed);
        const std::string tag = "seed_" + std::to_string(seed);
        io::write_trace_csv(dir / "traces" / (tag + "_trace.csv"), trace);
        io::write_occupancy_csv(dir / "traces" / (tag + "_occupancy.csv"), trace, dep.ap_channels);
        scenario::save_deployment(dep, dir / "traces" / (tag + "_deployment.json"));
    }
}

int report_failures(const runner::RunResult& run)
{
    for (const auto& f : run.failures) {
        std::cerr << "seed " << f.seed_index << " failed: " << f.message << '\n';
    }
    return run.failures.empty() ? 0 : kExitRuntime;
}

void print_summary(const std::string& label, const metrics::Report& r)
{
    std::printf("%-28s final mean %.4f  unsatisfied %.4f  reassociations %zu  (%zu seeds)\n", label.c_str(), r.final_mean,
                r.final_unsatisfied_fraction, r.total_reassociations, r.seeds);
}

int cmd_run(const std::string& path, const Overrides& ov)
{
    auto cfg = config::load_config(path);
    ov.apply(cfg);
    cfg.validate();
    const auto dir = output_dir_for(cfg, fs::path(path).stem().string());
    io::prepare_output_dir(dir);
    const auto run = runner::run_seeds(cfg, cfg.parallelism);
    io::write_json(dir / "config.json", config::to_json(cfg));
    json extra;
    extra["config"] = config::to_json(cfg);
    extra["master_seed"] = cfg.master_seed;
    extra["seed_indices"] = cfg.seed_indices();
    io::write_report(dir, run.report, extra);
    write_traces(dir, run);
    print_summary(fs::path(path).stem().string(), run.report);
    std::cout << "wrote " << dir.string() << '\n';
    return report_failures(run);
}

int cmd_preset(const std::string& name, const Overrides& ov)
{
    auto base = name == "toy" ? presets::toy_config() : presets::scenario_defaults();
    ov.apply(base);
    const auto preset = presets::make_preset(name, base);
    const auto dir = output_dir_for(base, name);
    io::prepare_output_dir(dir);
    const auto result = presets::run_preset(preset, base.parallelism);
    presets::write_preset(dir, result);
    int rc = 0;
    for (const auto& a : result.arms) {
        print_summary(a.label, a.run.report);
        rc = std::max(rc, report_failures(a.run));
    }
    if (!result.enumeration.empty()) {
        std::cout << presets::enumeration_csv(result.enumeration, result.arms.front().cfg.sim.deployment->sta_loads_mbps);
    }
    std::cout << "wrote " << dir.string() << '\n';
    return rc;
}

int cmd_enumerate(const std::string& path, const Overrides& ov, const std::string& out_csv)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + " is not valid JSON: " + e.what());
    }
    config::ExperimentConfig cfg;
    if (j.is_object() && j.contains("aps")) {
        cfg.deployment_file = fs::absolute(path);
        cfg.sim.deployment = scenario::deployment_from_json(j);
    } else {
        cfg = config::load_config(path);
    }
    ov.apply(cfg);
    const auto table = presets::enumerate(cfg);
    const auto& d = *cfg.sim.deployment;
    std::vector<double> loads = d.sta_loads_mbps.empty() ? std::vector<double>(d.sta_positions.size(), cfg.sim.load.mean_mbps) : d.sta_loads_mbps;
    const auto csv = presets::enumeration_csv(table, loads);
    if (out_csv.empty()) {
        std::cout << csv;
    } else {
        std::ofstream(out_csv) << csv;
    }
    std::size_t satisfying = 0;
    for (const auto& row : table) {
        satisfying += row.all_satisfied ? 1 : 0;
    }
    std::cerr << table.size() << " assignments, " << satisfying << " satisfy every STA\n";
    return 0;
}

int cmd_validate(const std::string& path, const Overrides& ov)
{
    auto cfg = config::load_config(path);
    ov.apply(cfg);
    cfg.validate();
    std::cout << config::to_json(cfg).dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Flow-level simulator of decentralized AP selection in enterprise WLANs"};
    app.require_subcommand(1);

    std::string path;
    std::string preset_name;
    std::string out_csv;
    Overrides run_ov, preset_ov, enum_ov, validate_ov;

    auto* run = app.add_subcommand("run", "run every seed of a configuration file");
    run->add_option("config", path, "JSON configuration (may be empty)")->required();
    run_ov.attach(run);

    auto* preset = app.add_subcommand("preset", "run a named experiment");
    preset->add_option("name", preset_name, "preset name")->required();
    preset_ov.attach(preset);

    auto* list = app.add_subcommand("presets", "list the available presets");

    auto* enumerate = app.add_subcommand("enumerate", "exhaustive association table of a fixed scenario");
    enumerate->add_option("scenario", path, "configuration with deployment_file, or a deployment JSON")->required();
    enumerate->add_option("--csv", out_csv, "write the table here instead of stdout");
    enum_ov.attach(enumerate);

    auto* validate = app.add_subcommand("validate", "check a configuration and print the resolved form");
    validate->add_option("config", path, "JSON configuration")->required();
    validate_ov.attach(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ExtrasError& e) {
        app.exit(e);
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg.rfind("--", 0) == 0 && std::string(e.what()).find(arg) != std::string::npos) {
                const std::string key = arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
                const auto hint = config::suggest_key(key);
                if (!hint.empty() && hint != key) {
                    std::cerr << "--" << key << ": did you mean --" << hint << "?\n";
                }
            }
        }
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(path, run_ov);
        }
        if (*preset) {
            return cmd_preset(preset_name, preset_ov);
        }
        if (*list) {
            for (const auto& n : presets::preset_names()) {
                std::cout << n << '\n';
            }
            return 0;
        }
        if (*enumerate) {
            return cmd_enumerate(path, enum_ov, out_csv);
        }
        if (*validate) {
            return cmd_validate(path, validate_ov);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
