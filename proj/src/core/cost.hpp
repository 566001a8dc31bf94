#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/rccm.hpp"

namespace addnet::cost {

enum class MultKind { Generic = 0, TwoAdd, ThreeAdd, FourAdd };

const char* mult_kind_name(MultKind kind);
MultKind mult_kind_for(rccm::Arch arch);

// Linear LUT growth per multiplier kind plus the block-RAM geometry ladder.
// The generic slope and the per-architecture slopes are synthesis-derived;
// intercepts are calibrated so the 9-bit savings and the 4-Add break-even
// point hold exactly, and can be overridden.
struct CostParams {
    double slope_generic = 7.4;
    std::array<double, 3> slope_rccm{2.0, 3.0, 4.0};
    double intercept_generic = 0.0;
    std::array<double, 3> intercept_rccm;

    static constexpr std::array<int, 5> kBramWidths{1, 2, 4, 9, 18};
    static constexpr std::array<int, 5> kBramDepths{16384, 8192, 4096, 2048, 1024};

    static CostParams defaults();
};

// Calibrated LUT range; outside it the linear model extrapolates.
inline constexpr int kMinWidth = 3;
inline constexpr int kMaxWidth = 16;

struct LutEstimate {
    double luts = 0.0;
    bool extrapolated = false;
};

LutEstimate lut_cost(MultKind kind, int w_in, const CostParams& params = CostParams::defaults());

// Fraction of generic-multiplier LUTs saved at a given input width.
double lut_savings(MultKind kind, int w_in, const CostParams& params = CostParams::defaults());

// Bits stored per weight: the select width for RCCMs, 8 for the generic
// fixed-point baseline.
int index_bits(MultKind kind);

// 36 Kb BRAM units (granularity 0.5 = one 18 Kb unit) to buffer the weights
// of one processing element at width bits_per_weight * parallelism.
double bram_estimate(uint64_t weights_per_pe, int bits_per_weight, int parallelism,
                     const CostParams& params = CostParams::defaults());

// Megabytes (1e6 bytes) of weight storage.
double layer_memory_mb(uint64_t weight_count, int bits_per_weight);

struct LayerSpec {
    std::string name;
    uint64_t weight_count = 0;
    int pes = 1;          // processing elements
    int parallelism = 1;  // multiplies per PE
};

struct LayerCost {
    std::string name;
    double luts = 0.0;
    double brams = 0.0;
    double memory_mb = 0.0;
    double baseline_luts = 0.0;
    double baseline_brams = 0.0;
    double baseline_memory_mb = 0.0;
};

struct CostReport {
    MultKind kind = MultKind::TwoAdd;
    int w_in = 9;
    std::vector<LayerCost> layers;
    LayerCost total;  // name "total"
};

// Aggregates per-layer LUT / BRAM / memory estimates against the 8-bit
// generic baseline.
CostReport network_report(std::span<const LayerSpec> layers, MultKind kind, int w_in = 9,
                          const CostParams& params = CostParams::defaults());

} // namespace addnet::cost
