#include "core/cost.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace addnet::cost {

const char* mult_kind_name(MultKind kind) {
    switch (kind) {
        case MultKind::Generic: return "generic";
        case MultKind::TwoAdd: return "2add";
        case MultKind::ThreeAdd: return "3add";
        case MultKind::FourAdd: return "4add";
    }
    return "?";
}

MultKind mult_kind_for(rccm::Arch arch) {
    switch (arch) {
        case rccm::Arch::TwoAdd: return MultKind::TwoAdd;
        case rccm::Arch::ThreeAdd: return MultKind::ThreeAdd;
        case rccm::Arch::FourAdd: return MultKind::FourAdd;
    }
    return MultKind::Generic;
}

CostParams CostParams::defaults() {
    CostParams p;
    const double generic9 = p.slope_generic * 9.0;  // 66.6
    // 9-bit savings of 55.2% / 32.8%, break-even at 9 bits for the 4-Add.
    p.intercept_rccm[0] = (1.0 - 0.552) * generic9 - p.slope_rccm[0] * 9.0;
    p.intercept_rccm[1] = (1.0 - 0.328) * generic9 - p.slope_rccm[1] * 9.0;
    p.intercept_rccm[2] = generic9 - p.slope_rccm[2] * 9.0;
    return p;
}

LutEstimate lut_cost(MultKind kind, int w_in, const CostParams& params) {
    if (w_in < 1) fail(ErrorCode::invalid_argument, "input width must be positive");
    LutEstimate e;
    e.extrapolated = w_in < kMinWidth || w_in > kMaxWidth;
    if (kind == MultKind::Generic) {
        e.luts = params.slope_generic * w_in + params.intercept_generic;
    } else {
        const size_t i = static_cast<size_t>(kind) - 1;
        e.luts = params.slope_rccm[i] * w_in + params.intercept_rccm[i];
    }
    return e;
}

double lut_savings(MultKind kind, int w_in, const CostParams& params) {
    const double generic = lut_cost(MultKind::Generic, w_in, params).luts;
    return 1.0 - lut_cost(kind, w_in, params).luts / generic;
}

int index_bits(MultKind kind) {
    switch (kind) {
        case MultKind::Generic: return 8;
        case MultKind::TwoAdd: return 4;
        case MultKind::ThreeAdd: return 6;
        case MultKind::FourAdd: return 8;
    }
    fail(ErrorCode::invalid_argument, "bad multiplier kind");
}

double bram_estimate(uint64_t weights_per_pe, int bits_per_weight, int parallelism,
                     const CostParams&) {
    if (weights_per_pe == 0 || bits_per_weight <= 0 || parallelism <= 0)
        fail(ErrorCode::invalid_argument, "bram_estimate arguments must be positive");
    const uint64_t depth_needed =
        (weights_per_pe + static_cast<uint64_t>(parallelism) - 1) / parallelism;

    // Decompose the port width into ladder columns (18-bit columns first,
    // one narrower column for the remainder), then stack units per column
    // until the depth fits.
    int remaining = bits_per_weight * parallelism;
    uint64_t units18 = 0;
    while (remaining > 0) {
        int w = CostParams::kBramWidths.back();
        size_t wi = CostParams::kBramWidths.size() - 1;
        if (remaining < w) {
            wi = 0;
            while (CostParams::kBramWidths[wi] < remaining) ++wi;
            w = CostParams::kBramWidths[wi];
        }
        const uint64_t depth = static_cast<uint64_t>(CostParams::kBramDepths[wi]);
        units18 += (depth_needed + depth - 1) / depth;
        remaining -= w;
    }
    return static_cast<double>(units18) / 2.0;
}

double layer_memory_mb(uint64_t weight_count, int bits_per_weight) {
    if (bits_per_weight < 0) fail(ErrorCode::invalid_argument, "negative bit width");
    return static_cast<double>(weight_count) * bits_per_weight / 8.0 / 1e6;
}

CostReport network_report(std::span<const LayerSpec> layers, MultKind kind, int w_in,
                          const CostParams& params) {
    CostReport rep;
    rep.kind = kind;
    rep.w_in = w_in;
    rep.total.name = "total";
    for (const auto& spec : layers) {
        if (spec.pes <= 0 || spec.parallelism <= 0)
            fail(ErrorCode::invalid_argument, "layer PEs and parallelism must be positive");
        LayerCost lc;
        lc.name = spec.name;
        const uint64_t per_pe =
            (spec.weight_count + static_cast<uint64_t>(spec.pes) - 1) / spec.pes;
        lc.luts = spec.pes * spec.parallelism * lut_cost(kind, w_in, params).luts;
        lc.brams = spec.pes * bram_estimate(per_pe, index_bits(kind), spec.parallelism, params);
        lc.memory_mb = layer_memory_mb(spec.weight_count, index_bits(kind));
        lc.baseline_luts =
            spec.pes * spec.parallelism * lut_cost(MultKind::Generic, w_in, params).luts;
        lc.baseline_brams =
            spec.pes * bram_estimate(per_pe, index_bits(MultKind::Generic), spec.parallelism,
                                     params);
        lc.baseline_memory_mb = layer_memory_mb(spec.weight_count, index_bits(MultKind::Generic));
        rep.total.luts += lc.luts;
        rep.total.brams += lc.brams;
        rep.total.memory_mb += lc.memory_mb;
        rep.total.baseline_luts += lc.baseline_luts;
        rep.total.baseline_brams += lc.baseline_brams;
        rep.total.baseline_memory_mb += lc.baseline_memory_mb;
        rep.layers.push_back(std::move(lc));
    }
    return rep;
}

} // namespace addnet::cost
