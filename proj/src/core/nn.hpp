#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/quantize.hpp"
#include "core/rccm.hpp"

namespace addnet::nn {

struct Tensor {
    std::vector<uint32_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<uint32_t> s) : shape(std::move(s)) {
        uint64_t n = 1;
        for (uint32_t d : shape) n *= d;
        data.assign(n, 0.0);
    }

    uint64_t size() const { return data.size(); }
    double* begin() { return data.data(); }
    double* end() { return data.data() + data.size(); }
};

// Deterministic RNG with hand-rolled distributions; identical streams on
// every platform for a given seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next();
    double uniform();                     // [0, 1)
    double uniform(double lo, double hi);
    double normal();                      // Box-Muller
    uint32_t below(uint32_t n);

private:
    uint64_t state_;
    std::optional<double> spare_;
};

enum class LayerKind { Dense, Conv2d };

// One compute layer. Quantized layers keep the signed coefficient chosen
// per weight during the last forward so the scale gradient can be formed.
struct Layer {
    LayerKind kind = LayerKind::Dense;
    std::string name;

    // Dense: weight shape [out, in]. Conv2d: [out_c, in_c, k, k], valid
    // padding, stride 1.
    Tensor weight;
    uint32_t in_h = 0, in_w = 0, in_c = 0;  // conv input geometry
    uint32_t kernel = 0;

    // Quantization state; disabled layers run the float path.
    bool quantized = false;
    std::vector<int32_t> positive_coeffs;
    bool has_zero = false;
    double lambda = 1.0;
    double clip = 0.0;  // M; 0 until initialized from the pretrained range
    rccm::RccmConfig config;

    // Output stage: ReLU + activation quantizer (final layer has neither).
    bool activation = true;
    bool act_quant = false;
    quant::FixedPointFormat act_fmt;

    uint32_t out_h() const { return in_h - kernel + 1; }
    uint32_t out_w() const { return in_w - kernel + 1; }
    uint32_t fan_in() const {
        return kind == LayerKind::Dense ? weight.shape[1] : in_c * kernel * kernel;
    }
    uint32_t fan_out() const { return weight.shape[0]; }
};

struct Model {
    std::vector<Layer> layers;
    uint32_t input_size = 0;
    uint32_t classes = 0;
    // Inputs are quantized to this format whenever any layer quantizes
    // activations; inputs are expected in [0, max_value()].
    quant::FixedPointFormat input_fmt{8, 7};
};

Model make_mlp(uint32_t inputs, uint32_t hidden, uint32_t classes, Rng& rng);
Model make_cnn(uint32_t in_h, uint32_t in_w, uint32_t conv1, uint32_t conv2, uint32_t kernel,
               uint32_t classes, Rng& rng);

// Forward pass scratch. Activations are carried both as values and, when
// quantized, as integer codes times a power-of-two scale; matrix work then
// runs over exactly-representable integers so an index-encoded integer
// evaluation reproduces the float path bit for bit.
struct Forward {
    std::vector<Tensor> inputs;      // per layer: value tensor fed in [B, ...]
    std::vector<Tensor> codes;       // integer codes of `inputs` (quant mode)
    std::vector<double> scales;      // power-of-two scale per layer input
    std::vector<Tensor> pre;         // pre-activation z per layer
    std::vector<Tensor> coeffs;      // signed coefficient per weight (quant layers)
    Tensor logits;
    uint32_t batch = 0;
};

// Runs the model on a batch laid out [batch, input_size]. When `quantize`
// is false every layer takes the float path regardless of its scheme.
void forward(const Model& model, const Tensor& batch_x, Forward& fw, bool quantize = true);

struct Gradients {
    std::vector<Tensor> weight;
    std::vector<double> lambda;
};

// Mean cross-entropy over the batch.
double cross_entropy(const Tensor& logits, std::span<const int32_t> labels);
// dL/dlogits for the mean cross-entropy loss.
Tensor cross_entropy_grad(const Tensor& logits, std::span<const int32_t> labels);

// Straight-through backward: weight gradients pass the quantizer unchanged
// (zeroed where |w| > clip), the scale gradient sums grad * coefficient,
// and activation quantizers pass gradients inside (0, m].
Gradients backward(const Model& model, const Forward& fw, const Tensor& dlogits,
                   bool quantize = true);

int32_t argmax_class(const Tensor& logits, uint32_t row);

} // namespace addnet::nn
