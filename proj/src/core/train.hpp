#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/nn.hpp"
#include "core/quantize.hpp"
#include "core/rccm.hpp"

namespace addnet::train {

// Deterministic synthetic classification tasks; the same spec regenerates
// the same samples bit for bit. Features live in [0, 1].
struct TaskSpec {
    enum class Kind { Blobs, Digits };
    Kind kind = Kind::Blobs;
    uint32_t classes = 3;
    uint32_t train_samples = 3000;
    uint32_t test_samples = 4000;
    uint64_t seed = 1;
    // Blobs: `dim` features, class centers on a ring, Gaussian spread.
    uint32_t dim = 8;
    double spread = 0.08;
    // Digits: glyphs rendered on an 8x8 patch with jitter and noise.
    double noise = 0.15;
};

std::optional<TaskSpec::Kind> task_kind_from_name(const std::string& name);
const char* task_kind_name(TaskSpec::Kind kind);

struct Dataset {
    nn::Tensor x;  // [n, features...] in [0, 1]
    std::vector<int32_t> labels;
    uint32_t classes = 0;
};

Dataset make_dataset(const TaskSpec& task, bool test_split);

struct TrainConfig {
    uint32_t epochs = 40;
    uint32_t batch = 32;
    double lr = 0.1;
    double lr_decay = 0.98;      // per-epoch multiplier
    double momentum = 0.0;
    double lambda_lr = 0.001;    // scale-parameter learning rate factor
    uint64_t seed = 1;
};

struct EpochMetrics {
    uint32_t epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

struct TrainResult {
    nn::Model model;
    std::vector<EpochMetrics> history;
    double final_test_accuracy = 0.0;
    // Pretraining byproducts consumed by distribution matching and scheme
    // initialization.
    std::vector<double> weight_range;  // max|w| per layer
    std::vector<double> pooled_weights;
};

// Builds the model for a task: MLP with one hidden layer for Blobs, the
// two-conv CNN for Digits.
nn::Model make_model(const TaskSpec& task, uint32_t hidden, uint64_t seed);

// Float pretraining; records per-layer ranges, pools weights, and picks
// per-layer activation formats from the observed activation peaks.
TrainResult pretrain_float(nn::Model model, const TaskSpec& task, const TrainConfig& config);

// Assigns a quantization scheme to every layer and retrains with
// straight-through gradients. `sets` holds one coefficient set per layer
// (commonly the same chosen set everywhere). Clip ranges come from the
// pretrained weights; lambda starts at clip / max|c|.
TrainResult train_quantized(nn::Model pretrained, const TaskSpec& task,
                            const TrainConfig& config,
                            const std::vector<rccm::CoefficientSet>& sets);

double evaluate_accuracy(const nn::Model& model, const Dataset& data, bool quantize);

// Index-encodes every quantized layer of a trained model.
std::vector<quant::EncodedLayer> export_encoded(const nn::Model& model);

} // namespace addnet::train
