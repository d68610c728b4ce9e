#include "apsel/phy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "apsel/error.hpp"

namespace apsel::phy {

namespace {

constexpr std::array<double, 12> kThresholds20 = {-82, -79, -77, -74, -70, -66, -65, -64, -59, -57, -54, -52};

constexpr std::array<double, 12> kRates20 = {8.6, 17.2, 25.8, 34.4, 51.6, 68.8, 77.4, 86.0, 103.2, 114.7, 129.0, 143.4};
constexpr std::array<double, 12> kRates40 = {17.2, 34.4, 51.6, 68.8, 103.2, 137.6, 154.9, 172.1, 206.5, 229.4, 258.1, 286.8};
constexpr std::array<double, 12> kRates80 = {36.0, 72.1, 108.1, 144.1, 216.2, 288.2, 324.3, 360.3, 432.4, 480.4, 540.4, 600.5};

// Non-HT control rate for the ACK, chosen from the entry threshold.
double legacy_rate_mbps(double min_rssi_dbm)
{
    if (min_rssi_dbm >= -70.0) {
        return 24.0;
    }
    if (min_rssi_dbm >= -77.0) {
        return 12.0;
    }
    return 6.0;
}

// Number of symbols needed for `bits` at `bits_per_symbol`. The small
// slack keeps exact divisions from rounding up on floating-point noise.
double symbols(double bits, double bits_per_symbol)
{
    return std::ceil(bits / bits_per_symbol - 1e-9);
}

bool all_positive(std::initializer_list<double> values)
{
    return std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

} // namespace

void PathLossParams::validate() const
{
    if (!(l0_db > 0.0) || !(gamma > 0.0) || !(wall_db >= 0.0) || !(walls_per_m >= 0.0) || !(shadow_max_db >= 0.0)) {
        throw ConfigError("path loss parameters out of range (need l0 > 0, gamma > 0, k >= 0, walls/m >= 0)");
    }
}

void TimingParams::validate() const
{
    if (!all_positive({t_phy_legacy_us, t_phy_he_su_us, sigma_us, sigma_legacy_us, sifs_us, difs_us, e_psi_slots, t_e_us,
                       l_sf_bits, l_mh_bits, l_tb_bits, l_ack_bits, l_frame_bits})) {
        throw ConfigError("timing parameters must all be strictly positive");
    }
}

RateTable::RateTable(std::vector<RateEntry> entries) : entries_(std::move(entries))
{
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const RateEntry& a, const RateEntry& b) { return a.min_rssi_dbm < b.min_rssi_dbm; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!(e.data_rate_bps > 0.0) || !(e.legacy_rate_bps > 0.0)) {
            throw ConfigError("rate table entries need positive data and legacy rates");
        }
        if (i > 0 && e.data_rate_bps < entries_[i - 1].data_rate_bps) {
            throw ConfigError("rate table data rates must not decrease with the RSSI threshold");
        }
    }
}

RateTable RateTable::builtin(int bandwidth_mhz)
{
    const std::array<double, 12>* rates = nullptr;
    double shift = 0.0;
    switch (bandwidth_mhz) {
    case 20:
        rates = &kRates20;
        break;
    case 40:
        rates = &kRates40;
        shift = 3.0;
        break;
    case 80:
        rates = &kRates80;
        shift = 6.0;
        break;
    default:
        throw ConfigError("no built-in rate table for " + std::to_string(bandwidth_mhz) + " MHz");
    }
    std::vector<RateEntry> entries;
    for (std::size_t i = 0; i < kThresholds20.size(); ++i) {
        const double threshold = kThresholds20[i] + shift;
        entries.push_back({threshold, (*rates)[i] * 1e6, legacy_rate_mbps(threshold) * 1e6});
    }
    return RateTable(std::move(entries));
}

double RateTable::lowest_threshold_dbm() const
{
    return lowest().min_rssi_dbm;
}

const RateEntry& RateTable::lowest() const
{
    if (entries_.empty()) {
        throw ConfigError("rate table is empty");
    }
    return entries_.front();
}

RateTableSet builtin_rate_tables()
{
    return {{20, RateTable::builtin(20)}, {40, RateTable::builtin(40)}, {80, RateTable::builtin(80)}};
}

RateTableSet load_rate_tables(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open rate table file " + path.string());
    }
    std::map<int, std::vector<RateEntry>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        double rssi = 0.0;
        double data = 0.0;
        double legacy = 0.0;
        int bw = 0;
        if (!(fields >> rssi >> data >> legacy >> bw)) {
            if (rows.empty() && std::isalpha(static_cast<unsigned char>(line[first]))) {
                continue; // header
            }
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 4 numeric columns");
        }
        rows[bw].push_back({rssi, data * 1e6, legacy * 1e6});
    }
    RateTableSet tables;
    for (auto& [bw, entries] : rows) {
        tables.emplace(bw, RateTable(std::move(entries)));
    }
    if (tables.empty()) {
        throw ConfigError("rate table file " + path.string() + " has no entries");
    }
    return tables;
}

double path_loss(double distance_m, const PathLossParams& params, double shadow_db)
{
    if (!std::isfinite(distance_m) || !std::isfinite(shadow_db)) {
        throw InvalidInput("path_loss: distance and shadowing must be finite");
    }
    const double d = std::max(distance_m, 1.0);
    return params.l0_db + 10.0 * params.gamma * std::log10(d) + params.wall_db * params.walls_per_m * d + shadow_db;
}

double sample_shadowing(Rng& rng, const PathLossParams& params)
{
    if (!params.shadowing_enabled) {
        return 0.0;
    }
    return rng.uniform(0.0, params.shadow_max_db);
}

std::optional<Rates> select_rates(double rssi_dbm, const RateTable& table)
{
    if (table.empty()) {
        throw ConfigError("select_rates: empty rate table");
    }
    const auto& entries = table.entries();
    auto it = std::upper_bound(entries.begin(), entries.end(), rssi_dbm,
                               [](double v, const RateEntry& e) { return v < e.min_rssi_dbm; });
    if (it == entries.begin()) {
        return std::nullopt;
    }
    --it;
    return Rates{it->data_rate_bps, it->legacy_rate_bps};
}

double frame_tx_time(double l_frame_bits, const Rates& rates, const TimingParams& t)
{
    if (!(rates.data_bps > 0.0) || !(rates.legacy_bps > 0.0) || !std::isfinite(rates.data_bps) ||
        !std::isfinite(rates.legacy_bps)) {
        throw InvalidInput("frame_tx_time: rates must be positive and finite");
    }
    if (!(l_frame_bits > 0.0)) {
        throw InvalidInput("frame_tx_time: frame size must be positive");
    }
    const double data_bits_per_symbol = rates.data_bps * t.sigma_us * 1e-6;
    const double ack_bits_per_symbol = rates.legacy_bps * t.sigma_legacy_us * 1e-6;
    const double t_data =
        t.t_phy_he_su_us + symbols(t.l_sf_bits + t.l_mh_bits + l_frame_bits + t.l_tb_bits, data_bits_per_symbol) * t.sigma_us;
    const double t_ack =
        t.t_phy_legacy_us + symbols(t.l_sf_bits + t.l_ack_bits + t.l_tb_bits, ack_bits_per_symbol) * t.sigma_legacy_us;
    return (t_data + t.sifs_us + t_ack + t.difs_us + t.t_e_us) * 1e-6;
}

double required_airtime(double load_bps, double l_frame_bits, const Rates& rates, const TimingParams& t)
{
    if (!(load_bps >= 0.0) || !std::isfinite(load_bps)) {
        throw InvalidInput("required_airtime: load must be finite and non-negative");
    }
    const double per_frame = t.e_psi_slots * t.t_e_us * 1e-6 + frame_tx_time(l_frame_bits, rates, t);
    return load_bps / l_frame_bits * per_frame;
}

} // namespace apsel::phy
