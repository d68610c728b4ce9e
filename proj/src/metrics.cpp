#include "apsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "apsel/error.hpp"

namespace apsel::metrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v)
{
    if (v.empty()) {
        return kNaN;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Mean over seeds that define the value.
double nan_mean(const std::vector<double>& v)
{
    double s = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (!std::isnan(x)) {
            s += x;
            ++n;
        }
    }
    return n == 0 ? kNaN : s / static_cast<double>(n);
}

} // namespace

double percentile(std::vector<double> values, double q)
{
    if (values.empty()) {
        throw InvalidInput("percentile of an empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidInput("percentile level must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<EcdfPoint> ecdf(std::vector<double> values)
{
    if (values.empty()) {
        throw InvalidInput("ecdf of an empty sample");
    }
    std::sort(values.begin(), values.end());
    std::vector<EcdfPoint> out;
    const auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) {
            continue;
        }
        out.push_back({values[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

BoxStats box_stats(const std::vector<double>& values)
{
    if (values.empty()) {
        return {kNaN, kNaN, kNaN, kNaN, kNaN};
    }
    return {percentile(values, 0.0), percentile(values, 0.25), percentile(values, 0.5), percentile(values, 0.75),
            percentile(values, 1.0)};
}

SeedSummary summarize_seed(std::span<const engine::RoundRecord> trace, std::uint64_t seed_index)
{
    if (trace.empty()) {
        throw InvalidInput("summarize_seed: empty trace");
    }
    SeedSummary s;
    s.seed_index = seed_index;
    std::vector<double> all;
    std::vector<double> agents;
    std::vector<double> others;
    for (const auto& rec : trace) {
        all.clear();
        agents.clear();
        others.clear();
        RoundStats r;
        r.round = rec.round;
        std::size_t unsat = 0;
        for (const auto& sta : rec.stas) {
            if (!sta.active) {
                continue;
            }
            all.push_back(sta.normalized);
            (sta.agent ? agents : others).push_back(sta.normalized);
            unsat += sta.satisfied ? 0 : 1;
            r.reassociations += sta.reassociated ? 1 : 0;
        }
        r.active = all.size();
        if (!all.empty()) {
            const auto box = box_stats(all);
            r.mean = mean_of(all);
            r.min = box.min;
            r.p25 = box.p25;
            r.p50 = box.p50;
            r.p75 = box.p75;
            r.max = box.max;
            r.unsatisfied_fraction = static_cast<double>(unsat) / static_cast<double>(all.size());
        } else {
            r.mean = r.min = r.p25 = r.p50 = r.p75 = r.max = kNaN;
        }
        r.agent_mean = mean_of(agents);
        r.non_agent_mean = mean_of(others);
        s.reassociations += r.reassociations;
        s.rounds.push_back(r);
    }
    for (const auto& sta : trace.back().stas) {
        if (sta.active) {
            s.final_normalized.push_back(sta.normalized);
            s.final_agent.push_back(sta.agent);
        }
    }
    s.final_unsatisfied_fraction = s.rounds.back().unsatisfied_fraction;
    return s;
}

Report aggregate_seeds(std::vector<SeedSummary> summaries)
{
    if (summaries.empty()) {
        throw InvalidInput("aggregate_seeds: no summaries");
    }
    std::sort(summaries.begin(), summaries.end(), [](const SeedSummary& a, const SeedSummary& b) { return a.seed_index < b.seed_index; });
    const std::size_t rounds = summaries.front().rounds.size();
    for (const auto& s : summaries) {
        if (s.rounds.size() != rounds) {
            throw InvalidInput("aggregate_seeds: seeds have different round counts");
        }
    }
    Report rep;
    rep.seeds = summaries.size();
    std::vector<double> col(summaries.size());
    auto per_round = [&](auto field) {
        std::vector<double> out(rounds);
        for (std::size_t t = 0; t < rounds; ++t) {
            for (std::size_t k = 0; k < summaries.size(); ++k) {
                col[k] = field(summaries[k].rounds[t]);
            }
            out[t] = nan_mean(col);
        }
        return out;
    };
    rep.mean_per_round = per_round([](const RoundStats& r) { return r.mean; });
    rep.agent_mean_per_round = per_round([](const RoundStats& r) { return r.agent_mean; });
    rep.non_agent_mean_per_round = per_round([](const RoundStats& r) { return r.non_agent_mean; });
    rep.unsatisfied_per_round = per_round([](const RoundStats& r) { return r.unsatisfied_fraction; });

    std::size_t unsat = 0;
    for (const auto& s : summaries) {
        rep.seed_indices.push_back(s.seed_index);
        rep.seed_final_means.push_back(s.final_round().mean);
        rep.seed_reassociations.push_back(s.reassociations);
        rep.total_reassociations += s.reassociations;
        for (double v : s.final_normalized) {
            rep.pooled_final.push_back(v);
            unsat += v < agents::kSatisfiedThreshold ? 1 : 0;
        }
    }
    rep.final_mean = rep.mean_per_round.empty() ? kNaN : rep.mean_per_round.back();
    rep.final_unsatisfied_fraction =
        rep.pooled_final.empty() ? kNaN : static_cast<double>(unsat) / static_cast<double>(rep.pooled_final.size());
    rep.final_box = box_stats(rep.pooled_final);
    return rep;
}

double reassociation_ratio(const Report& a, const Report& b)
{
    if (a.seed_indices != b.seed_indices) {
        throw InvalidInput("reassociation_ratio: reports are not paired on the same seeds");
    }
    if (b.total_reassociations == 0) {
        return a.total_reassociations == 0 ? kNaN : std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(a.total_reassociations) / static_cast<double>(b.total_reassociations);
}

} // namespace apsel::metrics
