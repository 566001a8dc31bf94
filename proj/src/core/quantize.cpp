#include "core/quantize.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace addnet::quant {

QuantScheme make_scheme(const rccm::CoefficientSet& set, double lambda, double clip) {
    if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "lambda must be positive");
    if (!(clip > 0.0)) fail(ErrorCode::invalid_argument, "clip must be positive");
    if (set.coefficients.empty()) fail(ErrorCode::invalid_argument, "empty coefficient set");

    QuantScheme s;
    s.lambda = lambda;
    s.clip = clip;
    s.config = set.witness;
    for (int32_t c : set.coefficients) {
        if (c == 0)
            s.has_zero = true;
        else if (c > 0)
            s.positive_coeffs.push_back(c);
    }
    if (s.positive_coeffs.empty())
        fail(ErrorCode::data, "degenerate coefficient set {0}");
    if (lambda * s.positive_coeffs.back() > clip * (1.0 + 1e-12))
        fail(ErrorCode::invalid_argument, "lambda * max coefficient exceeds clip range");

    for (int32_t c : set.coefficients) {
        const auto sel = rccm::select_for(set.witness, c);
        if (!sel)
            fail(ErrorCode::internal, "witness does not reach its own coefficient");
        s.select_lut.emplace(c, *sel);
    }
    return s;
}

QuantScheme make_scheme_for_range(const rccm::CoefficientSet& set, double weight_range) {
    if (!(weight_range > 0.0)) fail(ErrorCode::invalid_argument, "weight range must be positive");
    int32_t max_c = 0;
    for (int32_t c : set.coefficients) max_c = std::max(max_c, std::abs(c));
    if (max_c == 0) fail(ErrorCode::data, "degenerate coefficient set {0}");
    return make_scheme(set, weight_range / max_c, weight_range);
}

double clip_weight(double w, double clip) { return std::clamp(w, -clip, clip); }

Nearest nearest_value(double w, double lambda, double clip,
                      std::span<const int32_t> positive_coeffs, bool has_zero) {
    const double wc = clip_weight(w, clip);
    const double aw = std::abs(wc);

    // Scan the few candidates around |w|/lambda in ascending magnitude so a
    // tie settles on the smaller coefficient.
    int32_t best_c = -1;
    double best_err = 0.0;
    auto consider = [&](int32_t c) {
        const double err = std::abs(lambda * static_cast<double>(c) - aw);
        if (best_c < 0 || err < best_err) {
            best_c = c;
            best_err = err;
        }
    };
    if (has_zero) consider(0);
    // The window is two entries each side of the lower_bound split so that
    // rounding of aw/lambda near a candidate boundary cannot skip the true
    // nearest neighbor.
    const double target = aw / lambda;
    auto hi = std::lower_bound(positive_coeffs.begin(), positive_coeffs.end(), target);
    auto lo = hi;
    for (int back = 0; back < 2 && lo != positive_coeffs.begin(); ++back) --lo;
    for (auto it = lo; it != positive_coeffs.end() && it - lo < 4; ++it) consider(*it);

    const bool negative = wc < 0.0;
    const int32_t c = negative ? -best_c : best_c;
    return {lambda * static_cast<double>(c), c};
}

QuantizedWeight quantize_weight(double w, const QuantScheme& scheme) {
    const Nearest n =
        nearest_value(w, scheme.lambda, scheme.clip, scheme.positive_coeffs, scheme.has_zero);
    const auto it = scheme.select_lut.find(n.coefficient);
    if (it == scheme.select_lut.end())
        fail(ErrorCode::internal, "quantized coefficient missing from select table");
    return {n.value, n.coefficient, it->second};
}

double FixedPointFormat::max_value() const {
    return std::ldexp(static_cast<double>((1u << total_bits) - 1), -frac_bits);
}

uint32_t activation_code(double x, FixedPointFormat fmt) {
    if (x < 0.0) fail(ErrorCode::invalid_argument, "activation quantizer input is negative");
    if (fmt.total_bits < 1 || fmt.frac_bits < 0 || fmt.frac_bits > 30)
        fail(ErrorCode::invalid_argument, "bad fixed-point format");
    const double scaled = std::floor(std::ldexp(x, fmt.frac_bits) + 0.5);
    const double cap = static_cast<double>((1u << fmt.total_bits) - 1);
    return static_cast<uint32_t>(std::min(scaled, cap));
}

double quantize_activation(double x, FixedPointFormat fmt) {
    return std::ldexp(static_cast<double>(activation_code(x, fmt)), -fmt.frac_bits);
}

FixedPointFormat choose_activation_format(double peak, int total_bits, int max_frac) {
    FixedPointFormat fmt{total_bits, 0};
    for (int f = max_frac; f >= 0; --f) {
        fmt.frac_bits = f;
        if (fmt.max_value() >= peak) return fmt;
    }
    return fmt;
}

uint64_t EncodedLayer::count() const {
    uint64_t n = 1;
    for (uint32_t d : shape) n *= d;
    return n;
}

uint32_t packed_get(std::span<const uint8_t> bits, int width, uint64_t index) {
    uint32_t v = 0;
    const uint64_t base = index * static_cast<uint64_t>(width);
    for (int j = 0; j < width; ++j) {
        const uint64_t p = base + j;
        v |= static_cast<uint32_t>((bits[p >> 3] >> (p & 7)) & 1u) << j;
    }
    return v;
}

void packed_set(std::span<uint8_t> bits, int width, uint64_t index, uint32_t value) {
    const uint64_t base = index * static_cast<uint64_t>(width);
    for (int j = 0; j < width; ++j) {
        const uint64_t p = base + j;
        if ((value >> j) & 1u)
            bits[p >> 3] |= static_cast<uint8_t>(1u << (p & 7));
    }
}

EncodedLayer encode_layer(const std::string& name, std::span<const uint32_t> shape,
                          std::span<const double> weights, const QuantScheme& scheme) {
    EncodedLayer layer;
    layer.name = name;
    layer.shape.assign(shape.begin(), shape.end());
    layer.lambda = scheme.lambda;
    layer.config = scheme.config;
    if (layer.count() != weights.size())
        fail(ErrorCode::invalid_argument, "weight count does not match shape");

    const int width = layer.bits_per_weight();
    layer.bits.assign((weights.size() * width + 7) / 8, 0);
    for (uint64_t i = 0; i < weights.size(); ++i)
        packed_set(layer.bits, width, i, quantize_weight(weights[i], scheme).select);
    return layer;
}

std::vector<double> decode_layer(const EncodedLayer& layer) {
    rccm::validate(layer.config);
    const int width = layer.bits_per_weight();
    const uint64_t n = layer.count();
    if (layer.bits.size() * 8 < n * static_cast<uint64_t>(width))
        fail(ErrorCode::data, "index stream shorter than layer shape requires");
    std::vector<double> out(n);
    for (uint64_t i = 0; i < n; ++i) {
        const uint32_t sel = packed_get(layer.bits, width, i);
        out[i] = layer.lambda *
                 static_cast<double>(rccm::coefficient_of(layer.config, sel));
    }
    return out;
}

} // namespace addnet::quant
