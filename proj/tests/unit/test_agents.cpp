#include "doctest.h"

#include <vector>

#include "apsel/agents.hpp"
#include "apsel/error.hpp"
#include "scripted_choice.hpp"

using namespace apsel;
using namespace apsel::agents;
using apsel::testing::ScriptedChoice;

namespace {

AgentState two_arm_state(ApId current, bool satisfied)
{
    AgentState s;
    s.snapshot = {{0, -50.0}, {1, -60.0}};
    s.arms.resize(2);
    s.arms[0].ap = 0;
    s.arms[1].ap = 1;
    s.current_ap = current;
    s.last_satisfied = satisfied;
    s.rescan = false;
    return s;
}

} // namespace

TEST_CASE("average reward")
{
    ArmStats a;
    RewardStrategy avg;
    for (double r : {1.0, 0.5, 0.0}) {
        update_reward(a, r, avg);
    }
    CHECK(a.aggregate == doctest::Approx(0.5));
    CHECK(a.visits == 3);
    CHECK_THROWS_AS(update_reward(a, 1.5, avg), ContractViolation);
}

TEST_CASE("window reward keeps the newest values")
{
    ArmStats a;
    RewardStrategy w{RewardStrategy::Kind::Window, 2};
    for (double r : {1.0, 1.0, 0.0}) {
        update_reward(a, r, w);
    }
    CHECK(a.aggregate == doctest::Approx(0.5));
    update_reward(a, 0.0, w);
    CHECK(a.aggregate == doctest::Approx(0.0));
}

TEST_CASE("weighted reward favours recent values")
{
    ArmStats a;
    RewardStrategy w{RewardStrategy::Kind::Weighted, 0};
    update_reward(a, 0.0, w);
    update_reward(a, 1.0, w);
    // weights 1 (newest) and 1/2
    CHECK(a.aggregate == doctest::Approx(1.0 / 1.5));
    update_reward(a, 0.0, w);
    // weights 1, 2/3, 1/3 for rewards 0, 1, 0
    CHECK(a.aggregate == doctest::Approx((2.0 / 3.0) / 2.0));
}

TEST_CASE("epsilon-greedy exploits the best arm and explores on a coin")
{
    auto s = two_arm_state(0, false);
    s.arms[0].aggregate = 0.4;
    s.arms[1].aggregate = 0.9;
    ScriptedChoice c;
    c.exploit().explore(0);
    CHECK(eps_greedy_decide(s, 0.3, c) == 1);
    CHECK(eps_greedy_decide(s, 0.3, c) == 0);
}

TEST_CASE("sticky counter of one allows one unsatisfied round")
{
    AgentConfig cfg;
    cfg.sticky_max = 1;
    auto s = two_arm_state(0, true);
    s.arms[1].aggregate = 1.0;
    ScriptedChoice c;
    CHECK(eps_sticky_decide(s, cfg, 0.1, c) == 0);
    CHECK(s.sticking);
    CHECK(s.sticky_counter == 1);
    s.last_satisfied = false;
    c.exploit();
    CHECK(eps_sticky_decide(s, cfg, 0.1, c) == 1);
    CHECK_FALSE(s.sticking);
    CHECK(c.flips.empty());
}

TEST_CASE("sticky counter of two holds for one extra round")
{
    AgentConfig cfg;
    cfg.sticky_max = 2;
    auto s = two_arm_state(0, true);
    s.arms[1].aggregate = 1.0;
    ScriptedChoice c;
    CHECK(eps_sticky_decide(s, cfg, 0.1, c) == 0);
    s.last_satisfied = false;
    CHECK(eps_sticky_decide(s, cfg, 0.1, c) == 0);
    CHECK(s.sticky_counter == 1);
    c.exploit();
    CHECK(eps_sticky_decide(s, cfg, 0.1, c) == 1);
}

TEST_CASE("sticking forever never consults the coin")
{
    AgentConfig cfg;
    cfg.sticky_max = kStickForever;
    auto s = two_arm_state(1, true);
    ScriptedChoice c;
    CHECK(eps_sticky_decide(s, cfg, 1.0, c) == 1);
    s.last_satisfied = false;
    for (int i = 0; i < 100; ++i) {
        CHECK(eps_sticky_decide(s, cfg, 1.0, c) == 1);
    }
}

TEST_CASE("RSSI change threshold is inclusive")
{
    auto s = two_arm_state(0, false);
    s.arms[0].aggregate = 0.7;
    const std::vector<VisibleAp> small{{0, -52.9}, {1, -60.0}};
    CHECK_FALSE(maybe_reset(s, small, 3.0));
    CHECK(s.arms[0].aggregate == 0.7);
    const std::vector<VisibleAp> big{{0, -53.0}, {1, -60.0}};
    CHECK(maybe_reset(s, big, 3.0));
    CHECK(s.arms[0].aggregate == 0.0);
    CHECK(s.rescan);
    auto t = two_arm_state(0, false);
    const std::vector<VisibleAp> fewer{{0, -50.0}};
    CHECK(maybe_reset(t, fewer, 3.0));
    CHECK(t.arms.size() == 1);
}

TEST_CASE("first decision is strongest signal")
{
    Agent a(AgentConfig{});
    const std::vector<VisibleAp> row{{0, -70.0}, {1, -55.0}, {2, -60.0}};
    a.activate(row);
    ScriptedChoice c;
    CHECK(a.decide({}, c) == 1);
    a.observe(0.5);
    CHECK(a.state().arms[1].aggregate == 0.5);
    CHECK(a.state().decisions == 1);
}

TEST_CASE("strongest signal splits ties evenly")
{
    const std::vector<VisibleAp> row{{0, -60.0}, {1, -60.0}, {2, -70.0}};
    RngChoice choice(Rng(9));
    int first = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto ap = ss_decide(row, choice);
        CHECK(ap != 2);
        first += ap == 0 ? 1 : 0;
    }
    CHECK(static_cast<double>(first) / n == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("load-aware STAs move with probability rho when unsatisfied")
{
    AgentState s;
    s.snapshot = {{0, -50.0}, {1, -55.0}};
    s.current_ap = 0;
    const std::vector<double> loads{0.9, 0.2};
    RngChoice choice(Rng(10));
    int moves = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        moves += load_aware_decide(s, loads, 0.03, false, choice) == 1 ? 1 : 0;
    }
    CHECK(static_cast<double>(moves) / n == doctest::Approx(0.03).epsilon(0.005 / 0.03));
    for (int i = 0; i < 1000; ++i) {
        CHECK(load_aware_decide(s, loads, 0.03, true, choice) == 0);
    }
}

TEST_CASE("decreasing epsilon")
{
    AgentConfig cfg;
    cfg.epsilon_schedule = EpsilonSchedule::Decreasing;
    CHECK(cfg.epsilon_at(1) == doctest::Approx(1.0));
    CHECK(cfg.epsilon_at(4) == doctest::Approx(0.5));
    CHECK(cfg.epsilon_at(100) == doctest::Approx(0.1));
}

TEST_CASE("per-policy default epsilon")
{
    AgentConfig g;
    g.policy = Policy::EpsilonGreedy;
    CHECK(g.base_epsilon() == 0.05);
    AgentConfig s;
    CHECK(s.base_epsilon() == 0.1);
    s.epsilon = 0.3;
    CHECK(s.base_epsilon() == 0.3);
    s.epsilon = 1.2;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS(parse_policy("sticky"), ConfigError);
    CHECK(parse_policy(to_string(Policy::LoadAware)) == Policy::LoadAware);
}
