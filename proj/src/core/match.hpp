#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/enumerate.hpp"

namespace addnet::matching {

// Symmetric equal-width histogram over [-max|w|, +max|w|]. With an odd bin
// count the central bin straddles zero. Values landing on an interior bin
// edge go to the higher bin; the top edge itself falls into the last bin.
struct WeightHistogram {
    std::vector<uint64_t> counts;
    double max_abs = 0.0;
    uint64_t total = 0;

    int bins() const { return static_cast<int>(counts.size()); }
};

inline constexpr int kDefaultBins = 31;

WeightHistogram histogram(std::span<const double> weights, int bins = kDefaultBins);

// Bin index for a value under the histogram's edges.
int bin_of(const WeightHistogram& hist, double value);

// Distribution of a coefficient set placed against a histogram's range:
// coefficients are scaled by lambda_match = max|w| / max|c| (largest
// coefficient aligned to the range edge), binned with uniform mass 1/|C|,
// then smoothed additively so every bin carries mass >= eps.
struct SetDistribution {
    std::vector<double> masses;  // normalized, all > 0
    double lambda_match = 0.0;
};

SetDistribution set_distribution(std::span<const int32_t> coefficients,
                                 const WeightHistogram& hist, double eps = 1e-6);

// D_KL(P || R) in nats; terms with P(i) = 0 contribute zero.
double kl_divergence(const WeightHistogram& p, const SetDistribution& r);

struct RankedSet {
    size_t entry = 0;  // index into catalog.entries
    double score = 0.0;
};

struct MatchResult {
    // Zero-containing sets only, ascending score; equal scores ordered by
    // lexicographic coefficient list.
    std::vector<RankedSet> ranked;
    size_t chosen = 0;          // index into catalog.entries
    std::vector<size_t> top;    // the candidate window (catalog indices)
    std::string tie_break;      // why `chosen` won within the window
};

struct MatchOptions {
    double eps = 1e-6;
    int top_k = 5;
};

// Ranks every zero-containing catalog entry by divergence against `hist`,
// then picks the largest set from the top_k lowest-divergence window; size
// ties fall back to lower divergence, then lexicographic order.
MatchResult distribution_match(const enumeration::Catalog& catalog,
                               const WeightHistogram& hist, const MatchOptions& opt = {});

} // namespace addnet::matching
