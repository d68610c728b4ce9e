#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "apsel/rng.hpp"

namespace apsel::scenario {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Area {
    double width = 80.0;
    double height = 80.0;

    bool contains(const Point& p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

enum class ApPlacement { Grid, Random };
enum class StaPlacement { Uniform, Clustered };
enum class ChannelMode { GridPattern, GreedyColoring };
enum class LoadMode { Fixed, Variable };

/// Orthogonal 5 GHz channels available at a channel width (20/40/80 MHz).
const std::vector<int>& channel_set(int bandwidth_mhz);

struct Deployment {
    Area area;
    std::vector<Point> ap_positions;
    std::vector<Point> sta_positions;
    std::vector<Point> cluster_centers; // empty for uniform placement
    std::vector<std::size_t> sta_cluster;    // cluster index per STA, empty for uniform placement
    double cluster_box_m = 10.0;
    std::vector<int> ap_channels;
    int bandwidth_mhz = 20;
    std::vector<double> sta_loads_mbps; // optional per-STA fixed demand

    bool clustered() const { return !cluster_centers.empty(); }
    void validate() const;
};

nlohmann::json to_json(const Deployment& d);
Deployment deployment_from_json(const nlohmann::json& j);
Deployment load_deployment(const std::filesystem::path& path);
void save_deployment(const Deployment& d, const std::filesystem::path& path);

struct LoadModel {
    LoadMode mode = LoadMode::Fixed;
    double mean_mbps = 4.0;

    void validate() const;
    /// Largest per-round draw in variable mode.
    int variable_max() const;
};

struct MobilityModel {
    bool enabled = false;
    double theta = 0.0;

    void validate() const;
};

struct ArrivalSchedule {
    std::vector<int> arrival_round;
};

/// Grid mode requires a perfect-square count and puts one AP at the centre
/// of each equal square cell; random mode draws uniformly over the area.
std::vector<Point> place_aps(std::size_t count, const Area& area, ApPlacement mode, Rng& rng);

struct StaLayout {
    std::vector<Point> positions;
    std::vector<Point> cluster_centers;
    std::vector<std::size_t> membership;
};

/// Clustered mode draws ceil(count / cluster_size) box centres so each box lies
/// inside the area; STA k belongs to cluster k / cluster_size, so the last
/// cluster holds the remainder.
StaLayout place_stas(std::size_t count, const Area& area, StaPlacement mode, int cluster_size, Rng& rng,
                     double cluster_box_m = 10.0);

/// Assigns a channel to every AP.
///
/// Grid pattern works on the AP lattice: with at least 8 channels a 2x2 base
/// tile is alternated with a second set of 4 channels in a checkerboard of
/// tiles; with 4..7 channels the 2x2 tile repeats; with 2..3 channels the
/// lattice is checkerboarded. If the positions do not form a lattice the
/// greedy colouring is used instead.
///
/// Greedy colouring builds an interference graph (edge when two APs are
/// closer than `reuse_radius_m`; a non-positive radius selects
/// reuse_factor x mean nearest-neighbour distance), visits APs by descending
/// degree and gives each the least used channel not taken by a coloured
/// neighbour. Conflicts are accepted once channels run out.
std::vector<int> allocate_channels(const std::vector<Point>& ap_positions, const std::vector<int>& channels, ChannelMode mode,
                                   double reuse_radius_m = 0.0, double reuse_factor = 2.0);

/// Per-STA demand in Mb/s for one round.
std::vector<double> sample_round_loads(const LoadModel& model, std::size_t n_stas, Rng& rng);

struct MobilityStep {
    std::vector<Point> positions;
    std::vector<std::size_t> membership;
    std::vector<std::size_t> moved;
};

/// Each STA moves with probability theta to a uniformly chosen cluster and a
/// uniform position inside its box. Requires a clustered deployment.
MobilityStep apply_mobility(const std::vector<Point>& positions, const std::vector<Point>& cluster_centers,
                            const std::vector<std::size_t>& membership, double theta, Rng& rng, double cluster_box_m = 10.0);

/// Arrival rounds uniform on [1, window_rounds].
ArrivalSchedule sample_arrivals(std::size_t n_stas, int window_rounds, Rng& rng);

} // namespace apsel::scenario
