#include "core/match.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace addnet::matching {

WeightHistogram histogram(std::span<const double> weights, int bins) {
    if (bins < 1) fail(ErrorCode::invalid_argument, "bins must be positive");
    if (weights.empty()) fail(ErrorCode::invalid_argument, "no weights given");
    double max_abs = 0.0;
    for (double w : weights) max_abs = std::max(max_abs, std::abs(w));
    if (max_abs == 0.0) fail(ErrorCode::invalid_argument, "weights are all zero");

    WeightHistogram hist;
    hist.counts.assign(static_cast<size_t>(bins), 0);
    hist.max_abs = max_abs;
    hist.total = weights.size();
    for (double w : weights) ++hist.counts[static_cast<size_t>(bin_of(hist, w))];
    return hist;
}

int bin_of(const WeightHistogram& hist, double value) {
    const int bins = hist.bins();
    const double width = 2.0 * hist.max_abs / bins;
    const int idx = static_cast<int>(std::floor((value + hist.max_abs) / width));
    return std::clamp(idx, 0, bins - 1);
}

SetDistribution set_distribution(std::span<const int32_t> coefficients,
                                 const WeightHistogram& hist, double eps) {
    if (eps <= 0.0) fail(ErrorCode::invalid_argument, "eps must be positive");
    if (coefficients.empty()) fail(ErrorCode::invalid_argument, "empty coefficient set");
    int32_t max_c = 0;
    for (int32_t c : coefficients) max_c = std::max(max_c, std::abs(c));
    if (max_c == 0) fail(ErrorCode::data, "degenerate coefficient set {0}");

    SetDistribution dist;
    dist.lambda_match = hist.max_abs / max_c;
    dist.masses.assign(hist.counts.size(), 0.0);
    const double mass = 1.0 / static_cast<double>(coefficients.size());
    for (int32_t c : coefficients)
        dist.masses[static_cast<size_t>(bin_of(hist, dist.lambda_match * c))] += mass;
    const double norm = 1.0 + eps * static_cast<double>(dist.masses.size());
    for (double& m : dist.masses) m = (m + eps) / norm;
    return dist;
}

double kl_divergence(const WeightHistogram& p, const SetDistribution& r) {
    if (p.counts.size() != r.masses.size())
        fail(ErrorCode::invalid_argument, "histogram and distribution bin counts differ");
    if (p.total == 0) fail(ErrorCode::invalid_argument, "empty histogram");
    double d = 0.0;
    const double total = static_cast<double>(p.total);
    for (size_t i = 0; i < p.counts.size(); ++i) {
        if (p.counts[i] == 0) continue;
        const double pi = static_cast<double>(p.counts[i]) / total;
        d += pi * std::log(pi / r.masses[i]);
    }
    return d;
}

MatchResult distribution_match(const enumeration::Catalog& catalog,
                               const WeightHistogram& hist, const MatchOptions& opt) {
    if (catalog.entries.empty()) fail(ErrorCode::invalid_argument, "empty catalog");
    if (opt.top_k < 1) fail(ErrorCode::invalid_argument, "top_k must be positive");

    MatchResult res;
    for (size_t i = 0; i < catalog.entries.size(); ++i) {
        const auto& coeffs = catalog.entries[i].coefficients;
        if (!std::binary_search(coeffs.begin(), coeffs.end(), 0)) continue;
        const auto dist = set_distribution(coeffs, hist, opt.eps);
        res.ranked.push_back({i, kl_divergence(hist, dist)});
    }
    if (res.ranked.empty()) fail(ErrorCode::data, "no zero-containing sets in catalog");

    std::sort(res.ranked.begin(), res.ranked.end(),
              [&](const RankedSet& a, const RankedSet& b) {
                  if (a.score != b.score) return a.score < b.score;
                  return catalog.entries[a.entry].coefficients <
                         catalog.entries[b.entry].coefficients;
              });

    const size_t window = std::min<size_t>(static_cast<size_t>(opt.top_k), res.ranked.size());
    size_t best = 0;
    for (size_t i = 0; i < window; ++i) {
        res.top.push_back(res.ranked[i].entry);
        const size_t sz = catalog.entries[res.ranked[i].entry].coefficients.size();
        if (sz > catalog.entries[res.ranked[best].entry].coefficients.size()) best = i;
    }
    res.chosen = res.ranked[best].entry;
    const size_t chosen_size = catalog.entries[res.chosen].coefficients.size();
    if (best == 0)
        res.tie_break = "lowest divergence already largest in window";
    else
        res.tie_break = "largest set (" + std::to_string(chosen_size) + " coefficients) in top-" +
                        std::to_string(window) + " window";
    return res;
}

} // namespace addnet::matching
