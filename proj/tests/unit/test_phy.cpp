#include "doctest.h"

#include <cmath>

#include "apsel/phy.hpp"
#include "apsel/rng.hpp"

using namespace apsel;

TEST_CASE("path loss at reference points")
{
    phy::PathLossParams p;
    CHECK(phy::path_loss(1.0, p, 0.0) == doctest::Approx(54.12 + 0.525).epsilon(1e-12));
    p.walls_per_m = 0.0;
    CHECK(phy::path_loss(1.0, p, 0.0) == doctest::Approx(54.12).epsilon(1e-12));
    // below 1 m clamps to 1 m
    CHECK(phy::path_loss(0.2, p, 0.0) == doctest::Approx(54.12).epsilon(1e-12));
    CHECK(phy::path_loss(10.0, p, 0.0) == doctest::Approx(74.7267).epsilon(1e-12));
    p.walls_per_m = 0.1;
    CHECK(phy::path_loss(10.0, p, 5.0) == doctest::Approx(54.12 + 20.6067 + 5.25 + 5.0).epsilon(1e-12));
    CHECK(phy::path_loss(10.0, p, 5.0) == doctest::Approx(84.9767).epsilon(1e-12));
}

TEST_CASE("path loss grows with distance")
{
    phy::PathLossParams p;
    double prev = phy::path_loss(1.0, p, 0.0);
    for (double d = 1.5; d < 200.0; d *= 1.3) {
        const double pl = phy::path_loss(d, p, 0.0);
        CHECK(pl > prev);
        prev = pl;
    }
}

TEST_CASE("shadowing draws are uniform on [0, max]")
{
    phy::PathLossParams p;
    Rng rng(42);
    double sum = 0.0;
    double lo = 1e9;
    double hi = -1e9;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double s = phy::sample_shadowing(rng, p);
        sum += s;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(sum / n == doctest::Approx(5.0).epsilon(0.01));
    CHECK(lo >= 0.0);
    CHECK(hi <= 10.0);
    p.shadowing_enabled = false;
    CHECK(phy::sample_shadowing(rng, p) == 0.0);
}

TEST_CASE("lowest MCS frame time and airtime")
{
    const auto table = phy::RateTable::builtin(20);
    const auto& e = table.entries().front();
    const phy::Rates r{e.data_rate_bps, e.legacy_rate_bps};
    const phy::TimingParams timing;
    // 52 + 16*90 + 16 + 20 + 4*7 + 34 + 9 microseconds
    CHECK(phy::frame_tx_time(12000.0, r, timing) == doctest::Approx(1599e-6).epsilon(1e-12));
    CHECK(phy::required_airtime(4e6, 12000.0, r, timing) == doctest::Approx(0.5555).epsilon(1e-12));
}

TEST_CASE("rate selection picks the highest threshold not above the RSSI")
{
    const auto table = phy::RateTable::builtin(20);
    const auto r = phy::select_rates(-68.0, table);
    REQUIRE(r.has_value());
    CHECK(r->data_bps == doctest::Approx(table.entries()[4].data_rate_bps));
    CHECK_FALSE(phy::select_rates(-82.5, table).has_value());
    CHECK(phy::select_rates(-82.0, table).has_value());
    CHECK(phy::select_rates(-20.0, table)->data_bps == doctest::Approx(table.entries().back().data_rate_bps));
}

TEST_CASE("airtime is monotone in load and in RSSI")
{
    const phy::TimingParams timing;
    for (int bw : {20, 40, 80}) {
        const auto table = phy::RateTable::builtin(bw);
        double prev_t = 1e9;
        for (double rssi = table.lowest_threshold_dbm(); rssi < -30.0; rssi += 0.5) {
            const auto r = *phy::select_rates(rssi, table);
            const double t = phy::frame_tx_time(12000.0, r, timing);
            CHECK(t <= prev_t);
            prev_t = t;
            CHECK(phy::required_airtime(2e6, 12000.0, r, timing) < phy::required_airtime(3e6, 12000.0, r, timing));
        }
    }
}

TEST_CASE("wider channels never lower the rate")
{
    const auto t20 = phy::RateTable::builtin(20);
    const auto t40 = phy::RateTable::builtin(40);
    const auto t80 = phy::RateTable::builtin(80);
    for (std::size_t k = 0; k < t20.entries().size(); ++k) {
        CHECK(t40.entries()[k].data_rate_bps > t20.entries()[k].data_rate_bps);
        CHECK(t80.entries()[k].data_rate_bps > t40.entries()[k].data_rate_bps);
        CHECK(t40.entries()[k].min_rssi_dbm == doctest::Approx(t20.entries()[k].min_rssi_dbm + 3.0));
    }
}
