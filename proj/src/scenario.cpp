#include "apsel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "apsel/error.hpp"

namespace apsel::scenario {

double distance(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

const std::vector<int>& channel_set(int bandwidth_mhz)
{
    static const std::vector<int> ch20 = {36, 40, 44, 48, 52, 56, 60, 64};
    static const std::vector<int> ch40 = {38, 46, 54, 62};
    static const std::vector<int> ch80 = {42, 58};
    switch (bandwidth_mhz) {
    case 20:
        return ch20;
    case 40:
        return ch40;
    case 80:
        return ch80;
    default:
        throw ConfigError("unsupported bandwidth " + std::to_string(bandwidth_mhz) + " MHz (use 20, 40 or 80)");
    }
}

void Deployment::validate() const
{
    if (!(area.width > 0.0) || !(area.height > 0.0)) {
        throw ConfigError("deployment area must be positive");
    }
    if (ap_positions.empty()) {
        throw ConfigError("deployment needs at least one AP");
    }
    for (const auto& p : ap_positions) {
        if (!area.contains(p)) {
            throw ConfigError("AP position outside the deployment area");
        }
    }
    for (const auto& p : sta_positions) {
        if (!area.contains(p)) {
            throw ConfigError("STA position outside the deployment area");
        }
    }
    if (ap_channels.size() != ap_positions.size()) {
        throw ConfigError("ap_channels must have one entry per AP");
    }
    const auto& allowed = channel_set(bandwidth_mhz);
    for (int c : ap_channels) {
        if (std::find(allowed.begin(), allowed.end(), c) == allowed.end()) {
            throw ConfigError("channel " + std::to_string(c) + " is not valid at " + std::to_string(bandwidth_mhz) + " MHz");
        }
    }
    if (!cluster_centers.empty() && sta_cluster.size() != sta_positions.size()) {
        throw ConfigError("sta_cluster must have one entry per STA in a clustered deployment");
    }
    for (std::size_t c : sta_cluster) {
        if (c >= cluster_centers.size()) {
            throw ConfigError("sta_cluster refers to a missing cluster");
        }
    }
    if (!sta_loads_mbps.empty() && sta_loads_mbps.size() != sta_positions.size()) {
        throw ConfigError("sta_loads_mbps must have one entry per STA");
    }
    for (double w : sta_loads_mbps) {
        if (!(w > 0.0)) {
            throw ConfigError("per-STA loads must be positive");
        }
    }
}

namespace {

nlohmann::json points_to_json(const std::vector<Point>& pts)
{
    auto arr = nlohmann::json::array();
    for (const auto& p : pts) {
        arr.push_back({p.x, p.y});
    }
    return arr;
}

std::vector<Point> points_from_json(const nlohmann::json& j, const char* key)
{
    std::vector<Point> pts;
    if (!j.contains(key)) {
        return pts;
    }
    for (const auto& item : j.at(key)) {
        if (!item.is_array() || item.size() != 2) {
            throw ConfigError(std::string("deployment: '") + key + "' entries must be [x, y] pairs");
        }
        pts.push_back({item[0].get<double>(), item[1].get<double>()});
    }
    return pts;
}

} // namespace

nlohmann::json to_json(const Deployment& d)
{
    nlohmann::json j;
    j["area"] = {d.area.width, d.area.height};
    j["bandwidth_mhz"] = d.bandwidth_mhz;
    j["aps"] = points_to_json(d.ap_positions);
    j["ap_channels"] = d.ap_channels;
    j["stas"] = points_to_json(d.sta_positions);
    if (d.clustered()) {
        j["cluster_centers"] = points_to_json(d.cluster_centers);
        j["sta_cluster"] = d.sta_cluster;
        j["cluster_box_m"] = d.cluster_box_m;
    }
    if (!d.sta_loads_mbps.empty()) {
        j["sta_loads_mbps"] = d.sta_loads_mbps;
    }
    return j;
}

Deployment deployment_from_json(const nlohmann::json& j)
{
    static const std::vector<std::string> known = {"area",          "bandwidth_mhz", "aps",           "ap_channels",
                                                   "stas",          "cluster_centers", "sta_cluster", "cluster_box_m",
                                                   "sta_loads_mbps"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("deployment: unknown key '" + key + "'");
        }
    }
    Deployment d;
    try {
        if (j.contains("area")) {
            d.area = {j.at("area").at(0).get<double>(), j.at("area").at(1).get<double>()};
        }
        d.bandwidth_mhz = j.value("bandwidth_mhz", 20);
        d.ap_positions = points_from_json(j, "aps");
        d.sta_positions = points_from_json(j, "stas");
        d.cluster_centers = points_from_json(j, "cluster_centers");
        d.sta_cluster = j.value("sta_cluster", std::vector<std::size_t>{});
        d.cluster_box_m = j.value("cluster_box_m", 10.0);
        d.sta_loads_mbps = j.value("sta_loads_mbps", std::vector<double>{});
        if (j.contains("ap_channels")) {
            d.ap_channels = j.at("ap_channels").get<std::vector<int>>();
        } else {
            d.ap_channels = allocate_channels(d.ap_positions, channel_set(d.bandwidth_mhz), ChannelMode::GreedyColoring);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("deployment: ") + e.what());
    }
    d.validate();
    return d;
}

Deployment load_deployment(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open deployment file " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return deployment_from_json(j);
}

void save_deployment(const Deployment& d, const std::filesystem::path& path)
{
    std::ofstream out(path);
    out << to_json(d).dump(2) << '\n';
}

void LoadModel::validate() const
{
    if (!(mean_mbps > 0.0) || !std::isfinite(mean_mbps)) {
        throw ConfigError("mean load must be positive");
    }
    if (mode == LoadMode::Variable && variable_max() < 1) {
        throw ConfigError("variable load needs mean >= 1 Mb/s");
    }
}

int LoadModel::variable_max() const
{
    return static_cast<int>(std::floor(2.0 * mean_mbps - 1.0));
}

void MobilityModel::validate() const
{
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ConfigError("mobility probability must lie in [0, 1]");
    }
}

std::vector<Point> place_aps(std::size_t count, const Area& area, ApPlacement mode, Rng& rng)
{
    if (count == 0) {
        throw ConfigError("need at least one AP");
    }
    std::vector<Point> out;
    out.reserve(count);
    if (mode == ApPlacement::Grid) {
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
        if (side * side != count) {
            throw ConfigError("grid AP placement needs a perfect-square AP count, got " + std::to_string(count));
        }
        const double dx = area.width / static_cast<double>(side);
        const double dy = area.height / static_cast<double>(side);
        for (std::size_t row = 0; row < side; ++row) {
            for (std::size_t col = 0; col < side; ++col) {
                out.push_back({dx * (static_cast<double>(col) + 0.5), dy * (static_cast<double>(row) + 0.5)});
            }
        }
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform(0.0, area.width);
        const double y = rng.uniform(0.0, area.height);
        out.push_back({x, y});
    }
    return out;
}

namespace {

Point point_in_box(const Point& centre, double box, Rng& rng)
{
    const double x = rng.uniform(centre.x - box / 2.0, centre.x + box / 2.0);
    const double y = rng.uniform(centre.y - box / 2.0, centre.y + box / 2.0);
    return {x, y};
}

} // namespace

StaLayout place_stas(std::size_t count, const Area& area, StaPlacement mode, int cluster_size, Rng& rng, double cluster_box_m)
{
    StaLayout layout;
    layout.positions.reserve(count);
    if (mode == StaPlacement::Uniform) {
        for (std::size_t i = 0; i < count; ++i) {
            const double x = rng.uniform(0.0, area.width);
            const double y = rng.uniform(0.0, area.height);
            layout.positions.push_back({x, y});
        }
        return layout;
    }
    if (cluster_size <= 0) {
        throw ConfigError("cluster size must be positive");
    }
    if (cluster_box_m > area.width || cluster_box_m > area.height) {
        throw ConfigError("cluster box does not fit inside the area");
    }
    const auto per = static_cast<std::size_t>(cluster_size);
    const std::size_t n_clusters = (count + per - 1) / per;
    const double half = cluster_box_m / 2.0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        const double x = rng.uniform(half, area.width - half);
        const double y = rng.uniform(half, area.height - half);
        layout.cluster_centers.push_back({x, y});
    }
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t c = i / per;
        layout.membership.push_back(c);
        layout.positions.push_back(point_in_box(layout.cluster_centers[c], cluster_box_m, rng));
    }
    return layout;
}

namespace {

struct Lattice {
    std::vector<std::size_t> col;
    std::vector<std::size_t> row;
};

// Recovers integer lattice coordinates when the positions form a full grid.
bool infer_lattice(const std::vector<Point>& pts, Lattice& out)
{
    constexpr double tol = 1e-6;
    auto unique_sorted = [&](auto proj) {
        std::vector<double> v;
        for (const auto& p : pts) {
            v.push_back(proj(p));
        }
        std::sort(v.begin(), v.end());
        std::vector<double> u;
        for (double x : v) {
            if (u.empty() || x - u.back() > tol) {
                u.push_back(x);
            }
        }
        return u;
    };
    const auto xs = unique_sorted([](const Point& p) { return p.x; });
    const auto ys = unique_sorted([](const Point& p) { return p.y; });
    if (xs.size() * ys.size() != pts.size()) {
        return false;
    }
    auto locate = [&](const std::vector<double>& axis, double v) {
        auto it = std::lower_bound(axis.begin(), axis.end(), v - tol);
        return static_cast<std::size_t>(it - axis.begin());
    };
    std::vector<int> seen(pts.size(), 0);
    for (const auto& p : pts) {
        const std::size_t c = locate(xs, p.x);
        const std::size_t r = locate(ys, p.y);
        if (seen[r * xs.size() + c]++ != 0) {
            return false;
        }
        out.col.push_back(c);
        out.row.push_back(r);
    }
    return true;
}

std::vector<int> greedy_coloring(const std::vector<Point>& pts, const std::vector<int>& channels, double radius, double factor)
{
    const std::size_t n = pts.size();
    if (radius <= 0.0) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) {
                    best = std::min(best, distance(pts[i], pts[j]));
                }
            }
            total += std::isfinite(best) ? best : 0.0;
        }
        radius = n > 1 ? factor * total / static_cast<double>(n) : 0.0;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (distance(pts[i], pts[j]) < radius) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return adj[a].size() > adj[b].size(); });

    std::vector<int> colour(n, -1);
    std::vector<std::size_t> usage(channels.size(), 0);
    for (std::size_t v : order) {
        std::vector<std::size_t> conflicts(channels.size(), 0);
        for (std::size_t u : adj[v]) {
            if (colour[u] >= 0) {
                ++conflicts[static_cast<std::size_t>(colour[u])];
            }
        }
        std::size_t pick = 0;
        for (std::size_t c = 1; c < channels.size(); ++c) {
            if (std::tie(conflicts[c], usage[c]) < std::tie(conflicts[pick], usage[pick])) {
                pick = c;
            }
        }
        colour[v] = static_cast<int>(pick);
        ++usage[pick];
    }
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = channels[static_cast<std::size_t>(colour[i])];
    }
    return out;
}

} // namespace

std::vector<int> allocate_channels(const std::vector<Point>& ap_positions, const std::vector<int>& channels, ChannelMode mode,
                                   double reuse_radius_m, double reuse_factor)
{
    if (channels.empty()) {
        throw ConfigError("channel set is empty");
    }
    if (channels.size() == 1) {
        return std::vector<int>(ap_positions.size(), channels.front());
    }
    Lattice lattice;
    if (mode == ChannelMode::GridPattern && infer_lattice(ap_positions, lattice)) {
        std::vector<int> out;
        out.reserve(ap_positions.size());
        for (std::size_t k = 0; k < ap_positions.size(); ++k) {
            const std::size_t c = lattice.col[k];
            const std::size_t r = lattice.row[k];
            std::size_t idx = 0;
            if (channels.size() >= 8) {
                idx = (c % 2) + 2 * (r % 2) + 4 * (((c / 2) + (r / 2)) % 2);
            } else if (channels.size() >= 4) {
                idx = (c % 2) + 2 * (r % 2);
            } else {
                idx = (c + r) % 2;
            }
            out.push_back(channels[idx]);
        }
        return out;
    }
    return greedy_coloring(ap_positions, channels, reuse_radius_m, reuse_factor);
}

std::vector<double> sample_round_loads(const LoadModel& model, std::size_t n_stas, Rng& rng)
{
    std::vector<double> loads(n_stas, model.mean_mbps);
    if (model.mode == LoadMode::Variable) {
        const int hi = model.variable_max();
        for (auto& w : loads) {
            w = static_cast<double>(rng.integer(1, hi));
        }
    }
    return loads;
}

MobilityStep apply_mobility(const std::vector<Point>& positions, const std::vector<Point>& cluster_centers,
                            const std::vector<std::size_t>& membership, double theta, Rng& rng, double cluster_box_m)
{
    if (cluster_centers.empty()) {
        throw ConfigError("mobility requires a clustered STA deployment");
    }
    MobilityStep step{positions, membership, {}};
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!rng.bernoulli(theta)) {
            continue;
        }
        const auto c = static_cast<std::size_t>(rng.index(cluster_centers.size()));
        step.membership[i] = c;
        step.positions[i] = point_in_box(cluster_centers[c], cluster_box_m, rng);
        step.moved.push_back(i);
    }
    return step;
}

ArrivalSchedule sample_arrivals(std::size_t n_stas, int window_rounds, Rng& rng)
{
    if (window_rounds < 1) {
        throw ConfigError("arrival window must be at least one round");
    }
    ArrivalSchedule s;
    s.arrival_round.reserve(n_stas);
    for (std::size_t i = 0; i < n_stas; ++i) {
        s.arrival_round.push_back(static_cast<int>(rng.integer(1, window_rounds)));
    }
    return s;
}

} // namespace apsel::scenario
