#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "apsel/config.hpp"
#include "apsel/error.hpp"

using namespace apsel;
using namespace apsel::config;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text)
{
    const auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("empty configuration gives the defaults")
{
    const auto empty = load_config(write_temp("apsel_empty.json", ""));
    const auto braces = load_config(write_temp("apsel_braces.json", "{}"));
    const ExperimentConfig defaults;
    CHECK(to_json(empty) == to_json(defaults));
    CHECK(to_json(braces) == to_json(defaults));
    CHECK(defaults.sim.rounds == 240);
    CHECK(defaults.seeds == 100);
    CHECK(defaults.sim.phy.tx_power_dbm == 20.0);
}

TEST_CASE("misspelt keys get a suggestion")
{
    ExperimentConfig cfg;
    try {
        apply_key(cfg, "epsilonn", 0.2);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
        CHECK(std::string(e.what()).find("did you mean") != std::string::npos);
    }
    CHECK(suggest_key("epsilonn") == "epsilon");
    CHECK(suggest_key("completely_unrelated_name").empty());
}

TEST_CASE("resolved configuration round trips")
{
    ExperimentConfig cfg;
    apply_json(cfg, nlohmann::json::parse(R"({"policy": "eps_greedy", "epsilon": 0.25, "load_mode": "variable",
        "rounds": 50, "sticky_counter": "forever", "seed_list": [3, 9], "mobility_theta": 0.03125})"));
    const auto echo = to_json(cfg);
    ExperimentConfig again;
    apply_json(again, echo);
    CHECK(to_json(again) == echo);
    CHECK(again.sim.agent.sticky_max == agents::kStickForever);
    CHECK(again.seed_indices() == std::vector<std::uint64_t>{3, 9});
    CHECK(again.sim.mobility.enabled);
}

TEST_CASE("invalid values are rejected")
{
    ExperimentConfig cfg;
    for (const auto& [key, value] : {std::pair<std::string, nlohmann::json>{"rounds", 0}, {"epsilon", 1.5}, {"seeds", 0}}) {
        ExperimentConfig c;
        apply_key(c, key, value);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    CHECK_THROWS_AS(apply_key(cfg, "policy", "random"), ConfigError);
    CHECK_THROWS_AS(apply_key(cfg, "n_aps", "many"), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::array()), ConfigError);
}

TEST_CASE("flag values parse as JSON or fall back to strings")
{
    CHECK(parse_flag_value("0.5") == 0.5);
    CHECK(parse_flag_value("true") == true);
    CHECK(parse_flag_value("eps_sticky") == "eps_sticky");
    CHECK(parse_flag_value("[1,2]").is_array());
}

TEST_CASE("every key is documented")
{
    for (const auto& k : keys()) {
        CHECK_FALSE(k.help.empty());
    }
    CHECK(keys().size() >= 30);
}
