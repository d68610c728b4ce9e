#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apsel/config.hpp"
#include "apsel/engine.hpp"
#include "apsel/error.hpp"
#include "apsel/io.hpp"
#include "apsel/phy.hpp"
#include "apsel/presets.hpp"
#include "apsel/runner.hpp"

namespace py = pybind11;
using namespace apsel;

namespace {

// dicts cross the boundary as JSON text
nlohmann::json to_cpp(const py::object& obj)
{
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(text);
}

py::object to_py(const nlohmann::json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

config::ExperimentConfig make_config(const py::object& cfg)
{
    if (py::isinstance<py::str>(cfg)) {
        return config::load_config(cfg.cast<std::string>());
    }
    config::ExperimentConfig c;
    if (!cfg.is_none()) {
        config::apply_json(c, to_cpp(cfg));
    }
    c.validate();
    return c;
}

py::dict run_summary(const runner::RunResult& r)
{
    py::dict d = to_py(io::report_to_json(r.report));
    d["seed_final_means"] = r.report.seed_final_means;
    d["mean_per_round"] = r.report.mean_per_round;
    d["failures"] = r.failures.size();
    return d;
}

} // namespace

PYBIND11_MODULE(_apsel, m)
{
    m.doc() = "AP selection simulator core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

    m.def(
        "path_loss",
        [](double distance_m, double shadow_db, double walls_per_m) {
            phy::PathLossParams p;
            p.walls_per_m = walls_per_m;
            return phy::path_loss(distance_m, p, shadow_db);
        },
        py::arg("distance_m"), py::arg("shadow_db") = 0.0, py::arg("walls_per_m") = 0.1);

    m.def(
        "frame_tx_time",
        [](double data_mbps, double legacy_mbps) {
            return phy::frame_tx_time(12000.0, phy::Rates{data_mbps * 1e6, legacy_mbps * 1e6}, phy::TimingParams{});
        },
        py::arg("data_mbps"), py::arg("legacy_mbps"), "seconds for one data frame exchange");

    m.def(
        "required_airtime",
        [](double load_mbps, double data_mbps, double legacy_mbps) {
            return phy::required_airtime(load_mbps * 1e6, 12000.0, phy::Rates{data_mbps * 1e6, legacy_mbps * 1e6}, phy::TimingParams{});
        },
        py::arg("load_mbps"), py::arg("data_mbps"), py::arg("legacy_mbps"));

    m.def(
        "select_rates",
        [](double rssi_dbm, int bandwidth_mhz) -> std::optional<std::pair<double, double>> {
            const auto r = phy::select_rates(rssi_dbm, phy::RateTable::builtin(bandwidth_mhz));
            if (!r) {
                return std::nullopt;
            }
            return std::make_pair(r->data_bps / 1e6, r->legacy_bps / 1e6);
        },
        py::arg("rssi_dbm"), py::arg("bandwidth_mhz") = 20, "(data, legacy) rates in Mb/s, or None below the table");

    m.def("preset_names", &presets::preset_names);

    m.def(
        "resolve_config", [](const py::object& cfg) { return to_py(config::to_json(make_config(cfg))); }, py::arg("config") = py::none());

    m.def(
        "enumerate",
        [](const py::object& cfg) {
            const auto c = py::isinstance<py::str>(cfg) || !cfg.is_none() ? make_config(cfg) : presets::toy_config();
            py::list out;
            for (const auto& row : presets::enumerate(c)) {
                py::dict d;
                d["associations"] = row.associations;
                d["airtime"] = row.airtime;
                d["throughput_mbps"] = row.throughput_mbps;
                d["normalized"] = row.normalized;
                d["all_satisfied"] = row.all_satisfied;
                out.append(d);
            }
            return out;
        },
        py::arg("config") = py::none(), "exhaustive association table; the built-in toy scenario by default");

    m.def(
        "run",
        [](const py::object& cfg) {
            const auto c = make_config(cfg);
            runner::RunResult r;
            {
                py::gil_scoped_release release;
                r = runner::run_seeds(c, c.parallelism);
            }
            return run_summary(r);
        },
        py::arg("config") = py::none(), "runs every seed and returns the aggregated summary");

    m.def(
        "run_preset",
        [](const std::string& name, const py::object& overrides) {
            auto base = name == "toy" ? presets::toy_config() : presets::scenario_defaults();
            if (!overrides.is_none()) {
                config::apply_json(base, to_cpp(overrides));
            }
            const auto preset = presets::make_preset(name, base);
            presets::PresetResult res;
            {
                py::gil_scoped_release release;
                res = presets::run_preset(preset, base.parallelism);
            }
            py::dict out;
            for (const auto& arm : res.arms) {
                out[py::str(arm.label)] = run_summary(arm.run);
            }
            return out;
        },
        py::arg("name"), py::arg("overrides") = py::none(), "arm label -> summary; overrides apply to every arm before the preset's own settings");
}
