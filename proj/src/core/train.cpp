#include "core/train.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace addnet::train {

std::optional<TaskSpec::Kind> task_kind_from_name(const std::string& name) {
    if (name == "blobs") return TaskSpec::Kind::Blobs;
    if (name == "digits") return TaskSpec::Kind::Digits;
    return std::nullopt;
}

const char* task_kind_name(TaskSpec::Kind kind) {
    return kind == TaskSpec::Kind::Blobs ? "blobs" : "digits";
}

namespace {

// 8x8 glyph rows for the digits task, one bitmask row per line.
constexpr uint8_t kGlyphs[6][8] = {
    {0x00, 0x00, 0x00, 0x7e, 0x7e, 0x00, 0x00, 0x00},  // horizontal bar
    {0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18},  // vertical bar
    {0x80, 0x40, 0x20, 0x10, 0x08, 0x04, 0x02, 0x01},  // diagonal
    {0x18, 0x18, 0x18, 0xff, 0xff, 0x18, 0x18, 0x18},  // cross
    {0x7e, 0x42, 0x42, 0x42, 0x42, 0x42, 0x42, 0x7e},  // box
    {0x81, 0x42, 0x24, 0x18, 0x18, 0x24, 0x42, 0x81},  // X
};

void blob_center(uint32_t cls, uint32_t classes, uint32_t dim, std::vector<double>& center) {
    const double theta = 2.0 * 3.14159265358979323846 * cls / classes;
    center.assign(dim, 0.5);
    if (dim > 0) center[0] = 0.5 + 0.30 * std::cos(theta);
    if (dim > 1) center[1] = 0.5 + 0.30 * std::sin(theta);
}

} // namespace

Dataset make_dataset(const TaskSpec& task, bool test_split) {
    if (task.classes < 2) fail(ErrorCode::invalid_argument, "need at least two classes");
    const uint32_t n = test_split ? task.test_samples : task.train_samples;
    nn::Rng rng(task.seed * 2654435761u + (test_split ? 0x7e57u : 0));

    Dataset ds;
    ds.classes = task.classes;
    ds.labels.resize(n);

    if (task.kind == TaskSpec::Kind::Blobs) {
        ds.x = nn::Tensor({n, task.dim});
        std::vector<double> center;
        for (uint32_t i = 0; i < n; ++i) {
            const uint32_t cls = i % task.classes;
            ds.labels[i] = static_cast<int32_t>(cls);
            blob_center(cls, task.classes, task.dim, center);
            double* row = ds.x.data.data() + static_cast<uint64_t>(i) * task.dim;
            for (uint32_t j = 0; j < task.dim; ++j)
                row[j] = std::clamp(center[j] + task.spread * rng.normal(), 0.0, 1.0);
        }
        return ds;
    }

    const uint32_t classes = std::min<uint32_t>(task.classes, 6);
    ds.classes = classes;
    ds.x = nn::Tensor({n, 1, 8, 8});
    for (uint32_t i = 0; i < n; ++i) {
        const uint32_t cls = i % classes;
        ds.labels[i] = static_cast<int32_t>(cls);
        const int dy = static_cast<int>(rng.below(3)) - 1;
        const int dx = static_cast<int>(rng.below(3)) - 1;
        double* img = ds.x.data.data() + static_cast<uint64_t>(i) * 64;
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                const int sy = y - dy, sx = x - dx;
                const bool on = sy >= 0 && sy < 8 && sx >= 0 && sx < 8 &&
                                ((kGlyphs[cls][sy] >> (7 - sx)) & 1);
                double v = (on ? 0.85 : 0.10) + rng.uniform(-task.noise, task.noise);
                img[y * 8 + x] = std::clamp(v, 0.0, 1.0);
            }
    }
    return ds;
}

nn::Model make_model(const TaskSpec& task, uint32_t hidden, uint64_t seed) {
    nn::Rng rng(seed ^ 0xc0ffee);
    if (task.kind == TaskSpec::Kind::Blobs)
        return nn::make_mlp(task.dim, hidden, task.classes, rng);
    return nn::make_cnn(8, 8, 4, 8, 3, std::min<uint32_t>(task.classes, 6), rng);
}

double evaluate_accuracy(const nn::Model& model, const Dataset& data, bool quantize) {
    const uint32_t n = data.x.shape[0];
    const uint32_t feat = static_cast<uint32_t>(data.x.size() / n);
    nn::Forward fw;
    uint32_t correct = 0;
    constexpr uint32_t kChunk = 256;
    for (uint32_t at = 0; at < n; at += kChunk) {
        const uint32_t m = std::min(kChunk, n - at);
        std::vector<uint32_t> shape = data.x.shape;
        shape[0] = m;
        nn::Tensor batch(shape);
        std::copy_n(data.x.data.begin() + static_cast<uint64_t>(at) * feat,
                    static_cast<uint64_t>(m) * feat, batch.data.begin());
        nn::forward(model, batch, fw, quantize);
        for (uint32_t b = 0; b < m; ++b)
            if (nn::argmax_class(fw.logits, b) == data.labels[at + b]) ++correct;
    }
    return static_cast<double>(correct) / n;
}

namespace {

struct Sgd {
    std::vector<nn::Tensor> velocity;

    void step(nn::Model& model, const nn::Gradients& g, double lr, double momentum,
              double lambda_lr, bool update_lambda) {
        if (velocity.empty()) {
            velocity.reserve(model.layers.size());
            for (const auto& l : model.layers) velocity.emplace_back(l.weight.shape);
        }
        for (size_t li = 0; li < model.layers.size(); ++li) {
            nn::Layer& l = model.layers[li];
            auto& v = velocity[li];
            for (uint64_t i = 0; i < l.weight.size(); ++i) {
                v.data[i] = momentum * v.data[i] + g.weight[li].data[i];
                l.weight.data[i] -= lr * v.data[i];
            }
            if (update_lambda && l.quantized) {
                l.lambda -= lr * lambda_lr * g.lambda[li];
                const double top =
                    l.clip / static_cast<double>(l.positive_coeffs.back());
                l.lambda = std::clamp(l.lambda, 1e-8, top);
            }
        }
    }
};

struct Shuffled {
    std::vector<uint32_t> order;

    void reset(uint32_t n, nn::Rng& rng) {
        order.resize(n);
        for (uint32_t i = 0; i < n; ++i) order[i] = i;
        for (uint32_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
};

TrainResult run_training(nn::Model model, const TaskSpec& task, const TrainConfig& config,
                         bool quantize) {
    const Dataset train_set = make_dataset(task, false);
    const Dataset test_set = make_dataset(task, true);
    const uint32_t n = train_set.x.shape[0];
    const uint32_t feat = static_cast<uint32_t>(train_set.x.size() / n);

    nn::Rng rng(config.seed ^ 0x5eedb00c);
    Sgd sgd;
    Shuffled shuffle;
    nn::Forward fw;
    TrainResult res;
    double lr = config.lr;

    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle.reset(n, rng);
        double loss_sum = 0.0;
        uint32_t batches = 0;
        for (uint32_t at = 0; at < n; at += config.batch) {
            const uint32_t m = std::min(config.batch, n - at);
            std::vector<uint32_t> shape = train_set.x.shape;
            shape[0] = m;
            nn::Tensor batch(shape);
            std::vector<int32_t> labels(m);
            for (uint32_t b = 0; b < m; ++b) {
                const uint32_t src = shuffle.order[at + b];
                std::copy_n(train_set.x.data.begin() + static_cast<uint64_t>(src) * feat, feat,
                            batch.data.begin() + static_cast<uint64_t>(b) * feat);
                labels[b] = train_set.labels[src];
            }
            nn::forward(model, batch, fw, quantize);
            loss_sum += nn::cross_entropy(fw.logits, labels);
            const nn::Tensor dlogits = nn::cross_entropy_grad(fw.logits, labels);
            const nn::Gradients g = nn::backward(model, fw, dlogits, quantize);
            if (!std::isfinite(loss_sum))
                fail(ErrorCode::data, "training diverged (loss is not finite)");
            sgd.step(model, g, lr, config.momentum, config.lambda_lr, quantize);
            ++batches;
        }
        EpochMetrics em;
        em.epoch = epoch;
        em.loss = loss_sum / std::max(1u, batches);
        em.train_accuracy = evaluate_accuracy(model, train_set, quantize);
        em.test_accuracy = evaluate_accuracy(model, test_set, quantize);
        res.history.push_back(em);
        lr *= config.lr_decay;
    }

    res.final_test_accuracy =
        res.history.empty() ? evaluate_accuracy(model, test_set, quantize)
                            : res.history.back().test_accuracy;
    res.model = std::move(model);
    return res;
}

} // namespace

TrainResult pretrain_float(nn::Model model, const TaskSpec& task, const TrainConfig& config) {
    TrainResult res = run_training(std::move(model), task, config, false);

    // Range / histogram inputs for scheme setup and distribution matching.
    for (const auto& l : res.model.layers) {
        double mx = 0.0;
        for (double w : l.weight.data) {
            mx = std::max(mx, std::abs(w));
            res.pooled_weights.push_back(w);
        }
        res.weight_range.push_back(mx > 0.0 ? mx : 1e-3);
    }

    // Pick per-layer activation formats from the observed activation peaks
    // (99.9th percentile over the training set on the float path).
    const Dataset train_set = make_dataset(task, false);
    const uint32_t n = train_set.x.shape[0];
    const uint32_t feat = static_cast<uint32_t>(train_set.x.size() / n);
    std::vector<std::vector<double>> acts(res.model.layers.size());
    nn::Forward fw;
    constexpr uint32_t kChunk = 256;
    for (uint32_t at = 0; at < n; at += kChunk) {
        const uint32_t m = std::min(kChunk, n - at);
        std::vector<uint32_t> shape = train_set.x.shape;
        shape[0] = m;
        nn::Tensor batch(shape);
        std::copy_n(train_set.x.data.begin() + static_cast<uint64_t>(at) * feat,
                    static_cast<uint64_t>(m) * feat, batch.data.begin());
        nn::forward(res.model, batch, fw, false);
        for (size_t li = 0; li < res.model.layers.size(); ++li) {
            if (!res.model.layers[li].activation) continue;
            for (double z : fw.pre[li].data)
                if (z > 0.0) acts[li].push_back(z);
        }
    }
    for (size_t li = 0; li < res.model.layers.size(); ++li) {
        nn::Layer& l = res.model.layers[li];
        if (!l.activation) continue;
        double peak = 1.0;
        if (!acts[li].empty()) {
            auto& v = acts[li];
            const size_t idx = static_cast<size_t>(0.999 * (v.size() - 1));
            std::nth_element(v.begin(), v.begin() + static_cast<long>(idx), v.end());
            peak = std::max(v[idx], 1e-3);
        }
        l.act_fmt = quant::choose_activation_format(peak);
        l.act_quant = true;
    }
    return res;
}

TrainResult train_quantized(nn::Model pretrained, const TaskSpec& task,
                            const TrainConfig& config,
                            const std::vector<rccm::CoefficientSet>& sets) {
    if (sets.size() != pretrained.layers.size())
        fail(ErrorCode::invalid_argument, "need one coefficient set per layer");
    for (size_t li = 0; li < pretrained.layers.size(); ++li) {
        nn::Layer& l = pretrained.layers[li];
        const auto& set = sets[li];
        l.quantized = true;
        l.positive_coeffs.clear();
        l.has_zero = false;
        for (int32_t c : set.coefficients) {
            if (c == 0)
                l.has_zero = true;
            else if (c > 0)
                l.positive_coeffs.push_back(c);
        }
        if (l.positive_coeffs.empty())
            fail(ErrorCode::data, "degenerate coefficient set {0}");
        l.config = set.witness;
        double mx = 0.0;
        for (double w : l.weight.data) mx = std::max(mx, std::abs(w));
        l.clip = mx > 0.0 ? mx : 1e-3;
        l.lambda = l.clip / static_cast<double>(l.positive_coeffs.back());
    }
    return run_training(std::move(pretrained), task, config, true);
}

std::vector<quant::EncodedLayer> export_encoded(const nn::Model& model) {
    std::vector<quant::EncodedLayer> out;
    for (const auto& l : model.layers) {
        if (!l.quantized) continue;
        rccm::CoefficientSet set;
        set.arch = l.config.arch;
        set.witness = l.config;
        set.coefficients = rccm::coefficient_set(l.config);
        const auto scheme = quant::make_scheme(set, l.lambda, l.clip);
        out.push_back(quant::encode_layer(l.name, l.weight.shape, l.weight.data, scheme));
    }
    return out;
}

} // namespace addnet::train
