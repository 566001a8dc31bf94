#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/rccm.hpp"

namespace addnet::quant {

// Per-layer quantization scheme: positive coefficient magnitudes scaled by
// lambda, weights clipped to [-clip, clip] beforehand.
struct QuantScheme {
    std::vector<int32_t> positive_coeffs;  // strictly increasing, no zero
    bool has_zero = false;
    double lambda = 1.0;
    double clip = 1.0;
    rccm::RccmConfig config;
    std::unordered_map<int32_t, uint32_t> select_lut;  // signed coefficient -> smallest select
};

// Derives magnitudes / zero flag / select table from a coefficient set.
// Requires lambda, clip > 0 and lambda * max|c| <= clip.
QuantScheme make_scheme(const rccm::CoefficientSet& set, double lambda, double clip);

// Convenience initialization: clip = max|w| of the pretrained layer,
// lambda = clip / max|c| so the largest coefficient sits at the boundary.
QuantScheme make_scheme_for_range(const rccm::CoefficientSet& set, double weight_range);

double clip_weight(double w, double clip);

struct Nearest {
    double value = 0.0;       // sign(w) * lambda * c
    int32_t coefficient = 0;  // signed c
};

// Nearest scaled coefficient to the clipped weight; exact midpoints resolve
// toward the smaller magnitude, and sign(0) counts as positive.
Nearest nearest_value(double w, double lambda, double clip,
                      std::span<const int32_t> positive_coeffs, bool has_zero);

struct QuantizedWeight {
    double value = 0.0;
    int32_t coefficient = 0;
    uint32_t select = 0;
};

QuantizedWeight quantize_weight(double w, const QuantScheme& scheme);

// Unsigned fixed-point activation format: k total bits, f fractional bits,
// representable maximum m = (2^k - 1) / 2^f.
struct FixedPointFormat {
    int total_bits = 8;
    int frac_bits = 7;

    double max_value() const;
    bool operator==(const FixedPointFormat&) const = default;
};

// Round-to-nearest uniform quantizer on [0, m]; inputs above m saturate.
// Negative input violates the contract and throws.
double quantize_activation(double x, FixedPointFormat fmt);

// Integer code in [0, 2^k - 1]; value = code / 2^f.
uint32_t activation_code(double x, FixedPointFormat fmt);

// Largest fractional-bit count whose range still covers `peak`.
FixedPointFormat choose_activation_format(double peak, int total_bits = 8, int max_frac = 12);

struct EncodedLayer {
    std::string name;
    std::vector<uint32_t> shape;            // row-major
    double lambda = 1.0;
    rccm::RccmConfig config;
    std::vector<uint8_t> bits;              // packed selects, select_width(arch) per weight

    uint64_t count() const;
    int bits_per_weight() const { return rccm::select_width(config.arch); }
};

EncodedLayer encode_layer(const std::string& name, std::span<const uint32_t> shape,
                          std::span<const double> weights, const QuantScheme& scheme);

// Reconstructs the quantized weight values (lambda * coefficient per index).
std::vector<double> decode_layer(const EncodedLayer& layer);

uint32_t packed_get(std::span<const uint8_t> bits, int width, uint64_t index);
void packed_set(std::span<uint8_t> bits, int width, uint64_t index, uint32_t value);

} // namespace addnet::quant
