#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "apsel/rng.hpp"

namespace apsel::phy {

/// Indoor 5 GHz multi-wall log-distance model.
struct PathLossParams {
    double l0_db = 54.12;        // loss at 1 m
    double gamma = 2.06067;      // distance exponent
    double wall_db = 5.25;       // attenuation per traversed wall
    double walls_per_m = 0.1;    // average wall density
    bool shadowing_enabled = true;
    double shadow_max_db = 10.0; // shadowing ~ U(0, shadow_max_db)

    void validate() const;
};

/// 802.11ax PHY/MAC timing and frame sizes. Times in microseconds, sizes in bits.
struct TimingParams {
    double t_phy_legacy_us = 20.0;
    double t_phy_he_su_us = 52.0;
    double sigma_us = 16.0;
    double sigma_legacy_us = 4.0;
    double sifs_us = 16.0;
    double difs_us = 34.0;
    double e_psi_slots = 7.5;
    double t_e_us = 9.0;
    double l_sf_bits = 32.0;
    double l_mh_bits = 272.0;
    double l_tb_bits = 6.0;
    double l_ack_bits = 112.0;
    double l_frame_bits = 12000.0;

    void validate() const;
};

struct Rates {
    double data_bps = 0.0;
    double legacy_bps = 0.0;
};

struct RateEntry {
    double min_rssi_dbm = 0.0;
    double data_rate_bps = 0.0;
    double legacy_rate_bps = 0.0;
};

/// RSSI-threshold rate table for one channel width, sorted by min_rssi.
class RateTable {
public:
    RateTable() = default;
    explicit RateTable(std::vector<RateEntry> entries);

    /// Built-in single-stream table for 20, 40 or 80 MHz.
    static RateTable builtin(int bandwidth_mhz);

    const std::vector<RateEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    double lowest_threshold_dbm() const;
    const RateEntry& lowest() const;

private:
    std::vector<RateEntry> entries_;
};

/// Rate tables keyed by bandwidth (MHz).
using RateTableSet = std::map<int, RateTable>;

RateTableSet builtin_rate_tables();

/// Reads a whitespace/comma separated file with the columns
/// `min_rssi_dbm data_rate_mbps legacy_rate_mbps bandwidth_mhz`.
/// Lines starting with '#' and a header line are skipped.
RateTableSet load_rate_tables(const std::filesystem::path& path);

/// Loss in dB at `distance_m`; distances below 1 m are treated as 1 m.
double path_loss(double distance_m, const PathLossParams& params, double shadow_db);

/// One shadowing draw for a link; 0 when shadowing is disabled.
double sample_shadowing(Rng& rng, const PathLossParams& params);

/// Rates of the highest entry whose threshold is at or below `rssi_dbm`.
/// std::nullopt means the link is out of range. Throws ConfigError on an
/// empty table.
std::optional<Rates> select_rates(double rssi_dbm, const RateTable& table);

/// Duration of one DATA + SIFS + ACK + DIFS + empty slot exchange, in seconds.
double frame_tx_time(double l_frame_bits, const Rates& rates, const TimingParams& timing);

/// Fraction of each second needed to carry `load_bps` (may exceed 1).
double required_airtime(double load_bps, double l_frame_bits, const Rates& rates, const TimingParams& timing);

} // namespace apsel::phy
