#include "apsel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "apsel/error.hpp"

namespace apsel::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

} // namespace

void write_trace_csv(const fs::path& path, std::span<const engine::RoundRecord> trace)
{
    auto out = open_out(path);
    out << "round,sta_id,ap_id,load_mbps,throughput_mbps,normalized_throughput,satisfied,reassociated,agent\n";
    for (const auto& rec : trace) {
        for (std::size_t i = 0; i < rec.stas.size(); ++i) {
            const auto& s = rec.stas[i];
            if (!s.active) {
                continue;
            }
            out << rec.round << ',' << i << ',' << s.ap << ',' << g17(s.load_mbps) << ',' << g17(s.throughput_mbps) << ','
                << g17(s.normalized) << ',' << int(s.satisfied) << ',' << int(s.reassociated) << ',' << int(s.agent) << '\n';
        }
    }
}

std::vector<engine::RoundRecord> read_trace_csv(const fs::path& path, std::size_t n_stas)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot read trace " + path.string());
    }
    std::string line;
    std::getline(in, line);
    std::vector<engine::RoundRecord> trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto c = split_csv(line);
        if (c.size() != 9) {
            throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": expected 9 columns");
        }
        const int round = std::stoi(c[0]);
        const auto sta = static_cast<std::size_t>(std::stoull(c[1]));
        if (sta >= n_stas) {
            throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": STA id out of range");
        }
        if (trace.empty() || trace.back().round != round) {
            engine::RoundRecord rec;
            rec.round = round;
            rec.stas.resize(n_stas);
            trace.push_back(std::move(rec));
        }
        auto& s = trace.back().stas[sta];
        s.active = true;
        s.ap = static_cast<engine::ApId>(std::stoull(c[2]));
        s.load_mbps = std::stod(c[3]);
        s.throughput_mbps = std::stod(c[4]);
        s.normalized = std::stod(c[5]);
        s.satisfied = c[6] == "1";
        s.reassociated = c[7] == "1";
        s.agent = c[8] == "1";
    }
    return trace;
}

void write_occupancy_csv(const fs::path& path, std::span<const engine::RoundRecord> trace, std::span<const int> channels)
{
    auto out = open_out(path);
    out << "round,ap_id,channel,raw_occupancy,offered_load_mbps\n";
    for (const auto& rec : trace) {
        for (std::size_t j = 0; j < rec.aps.size(); ++j) {
            out << rec.round << ',' << j << ',' << (j < channels.size() ? channels[j] : 0) << ',' << g17(rec.aps[j].raw_occupancy) << ','
                << g17(rec.aps[j].offered_load_mbps) << '\n';
        }
    }
}

json report_to_json(const metrics::Report& r)
{
    json j;
    j["seeds"] = r.seeds;
    j["final_mean_normalized_throughput"] = number_or_null(r.final_mean);
    j["final_unsatisfied_fraction"] = number_or_null(r.final_unsatisfied_fraction);
    j["total_reassociations"] = r.total_reassociations;
    j["final_agent_mean"] = r.agent_mean_per_round.empty() ? json(nullptr) : number_or_null(r.agent_mean_per_round.back());
    j["final_non_agent_mean"] = r.non_agent_mean_per_round.empty() ? json(nullptr) : number_or_null(r.non_agent_mean_per_round.back());
    j["final_box"] = {{"min", number_or_null(r.final_box.min)},
                      {"p25", number_or_null(r.final_box.p25)},
                      {"p50", number_or_null(r.final_box.p50)},
                      {"p75", number_or_null(r.final_box.p75)},
                      {"max", number_or_null(r.final_box.max)}};
    return j;
}

void write_report(const fs::path& dir, const metrics::Report& r, const json& extra)
{
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "per_round.csv");
        out << "round,mean,agent_mean,non_agent_mean,unsatisfied_fraction\n";
        for (std::size_t t = 0; t < r.mean_per_round.size(); ++t) {
            auto cell = [](double v) { return std::isfinite(v) ? g17(v) : std::string(); };
            out << t + 1 << ',' << cell(r.mean_per_round[t]) << ',' << cell(r.agent_mean_per_round[t]) << ','
                << cell(r.non_agent_mean_per_round[t]) << ',' << cell(r.unsatisfied_per_round[t]) << '\n';
        }
    }
    {
        auto out = open_out(dir / "cdf.csv");
        out << "value,fraction\n";
        if (!r.pooled_final.empty()) {
            for (const auto& p : metrics::ecdf(r.pooled_final)) {
                out << g17(p.value) << ',' << g17(p.fraction) << '\n';
            }
        }
    }
    {
        auto out = open_out(dir / "boxplot.csv");
        out << "min,p25,p50,p75,max\n";
        out << g17(r.final_box.min) << ',' << g17(r.final_box.p25) << ',' << g17(r.final_box.p50) << ',' << g17(r.final_box.p75) << ','
            << g17(r.final_box.max) << '\n';
    }
    {
        auto out = open_out(dir / "per_seed.csv");
        out << "seed_index,final_mean,reassociations\n";
        for (std::size_t k = 0; k < r.seed_indices.size(); ++k) {
            out << r.seed_indices[k] << ',' << g17(r.seed_final_means[k]) << ',' << r.seed_reassociations[k] << '\n';
        }
    }
    json summary = extra.is_object() ? extra : json::object();
    summary["report"] = report_to_json(r);
    write_json(dir / "summary.json", summary);
}

void write_json(const fs::path& path, const json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void prepare_output_dir(const fs::path& dir)
{
    if (dir.empty()) {
        throw ConfigError("no output directory given");
    }
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) {
            throw ConfigError("output path " + dir.string() + " exists and is not a directory");
        }
        if (!fs::is_empty(dir)) {
            throw ConfigError("output directory " + dir.string() + " is not empty; refusing to overwrite");
        }
    }
    fs::create_directories(dir);
}

} // namespace apsel::io
