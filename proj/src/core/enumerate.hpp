#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/rccm.hpp"

namespace addnet::enumeration {

// Distinct outputs of one type-A cell over its 4 selects at a = b = 1.
// Two cell configs with the same value set contribute identical downstream
// coefficient sets, so enumeration dedupes on this early.
struct CellOutcome {
    std::vector<int32_t> values;  // sorted distinct, 1..4 entries
    rccm::CellConfigA witness;
};

// Sweep all 4 * (phi_max+1)^4 type-A configs and dedupe by value set.
std::vector<CellOutcome> enumerate_cell_a(int phi_max);

struct EnumerateOptions {
    int phi_max = 3;
    unsigned threads = 0;  // 0 = hardware concurrency
    uint64_t memory_cap_bytes = 4ull << 30;
    std::filesystem::path spill_dir;  // empty = system temp dir
    // Called with (done, total) in coarse outer-loop units.
    std::function<void(uint64_t, uint64_t)> progress;
};

struct Catalog {
    rccm::Arch arch = rccm::Arch::TwoAdd;
    int phi_max = 3;
    std::string generator;
    // Pairwise distinct canonical sets, sorted by (size, lexicographic).
    std::vector<rccm::CoefficientSet> entries;
};

inline constexpr const char* kGeneratorTag = "enum-v1";

// Exhaustive catalog of all unique coefficient sets reachable by `arch`.
// Dedup state beyond memory_cap_bytes is spilled to disk.
Catalog enumerate_sets(rccm::Arch arch, const EnumerateOptions& opt = {});

// Like enumerate_sets but hands each unique entry to `sink` instead of
// materializing the catalog. Order is deterministic for fixed options:
// hash-shard major, (size, lexicographic) within a shard. Returns the
// number of unique sets.
uint64_t enumerate_stream(rccm::Arch arch, const EnumerateOptions& opt,
                          const std::function<void(const rccm::CoefficientSet&)>& sink);

struct CountResult {
    uint64_t unique_sets = 0;
    uint64_t candidates = 0;  // staged candidates before final dedup
};

// Unique-set count only. Dedupes on 128-bit set fingerprints, which keeps
// the footprint at ~16 bytes per set; a fingerprint collision (probability
// < 1e-20 at any reachable scale) would undercount by one.
CountResult count_unique_sets(rccm::Arch arch, const EnumerateOptions& opt = {});

// Membership by exact canonical-list equality. `canonical` must be sorted
// strictly ascending; throws Error(invalid_argument) otherwise.
bool contains(const Catalog& catalog, std::span<const int32_t> canonical);

} // namespace addnet::enumeration
