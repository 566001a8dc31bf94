#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/nn.hpp"
#include "core/quantize.hpp"
#include "core/rccm.hpp"

using namespace addnet;
using nn::Forward;
using nn::Model;
using nn::Tensor;

namespace {

Tensor random_batch(uint32_t batch, uint32_t features, nn::Rng& rng) {
    Tensor t({batch, features});
    for (auto& v : t.data) v = rng.uniform();  // [0, 1) like task inputs
    return t;
}

std::vector<int32_t> random_labels(uint32_t batch, uint32_t classes, nn::Rng& rng) {
    std::vector<int32_t> labels(batch);
    for (auto& l : labels) l = static_cast<int32_t>(rng.below(classes));
    return labels;
}

void assign_scheme(nn::Layer& layer, rccm::Arch arch, double clip_scale = 1.0) {
    const auto set = rccm::make_coefficient_set(rccm::optimized_config(arch));
    layer.quantized = true;
    layer.positive_coeffs.clear();
    layer.has_zero = false;
    for (int32_t c : set.coefficients) {
        if (c == 0) layer.has_zero = true;
        if (c > 0) layer.positive_coeffs.push_back(c);
    }
    layer.config = set.witness;
    double mx = 0.0;
    for (double w : layer.weight.data) mx = std::max(mx, std::abs(w));
    layer.clip = (mx > 0 ? mx : 1.0) * clip_scale;
    layer.lambda = layer.clip / layer.positive_coeffs.back();
}

Model quantized_mlp(uint32_t in, uint32_t hidden, uint32_t classes, rccm::Arch arch,
                    uint64_t seed) {
    nn::Rng rng(seed);
    Model m = nn::make_mlp(in, hidden, classes, rng);
    for (auto& l : m.layers) {
        assign_scheme(l, arch);
        if (l.activation) {
            l.act_quant = true;
            l.act_fmt = {8, 5};
        }
    }
    return m;
}

} // namespace

TEST_CASE("rng is deterministic") {
    nn::Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    nn::Rng c(7), d(8);
    CHECK(c.next() != d.next());
}

TEST_CASE("float forward ignores schemes when quantization is disabled") {
    nn::Rng rng(3);
    Model plain = nn::make_mlp(6, 10, 3, rng);
    Model schemed = plain;
    for (auto& l : schemed.layers) assign_scheme(l, rccm::Arch::ThreeAdd);

    nn::Rng brng(9);
    const Tensor x = random_batch(4, 6, brng);
    Forward fa, fb;
    nn::forward(plain, x, fa, false);
    nn::forward(schemed, x, fb, false);
    REQUIRE(fa.logits.size() == fb.logits.size());
    for (uint64_t i = 0; i < fa.logits.size(); ++i)
        CHECK(fa.logits.data[i] == fb.logits.data[i]);
}

TEST_CASE("all-zero weights give all-zero logits") {
    nn::Rng rng(3);
    Model m = nn::make_mlp(5, 8, 4, rng);
    for (auto& l : m.layers)
        for (auto& w : l.weight.data) w = 0.0;
    nn::Rng brng(4);
    const Tensor x = random_batch(3, 5, brng);
    Forward fw;
    nn::forward(m, x, fw, false);
    for (double v : fw.logits.data) CHECK(v == 0.0);
}

TEST_CASE("float-path gradients match central differences") {
    nn::Rng rng(11);
    Model m = nn::make_mlp(4, 6, 3, rng);
    nn::Rng brng(12);
    const Tensor x = random_batch(8, 4, brng);
    const auto labels = random_labels(8, 3, brng);

    Forward fw;
    nn::forward(m, x, fw, false);
    const auto g = nn::backward(m, fw, nn::cross_entropy_grad(fw.logits, labels), false);

    nn::Rng pick(13);
    for (int trial = 0; trial < 30; ++trial) {
        const size_t li = pick.below(static_cast<uint32_t>(m.layers.size()));
        const size_t wi = pick.below(static_cast<uint32_t>(m.layers[li].weight.size()));
        const double h = 1e-6;
        double& w = m.layers[li].weight.data[wi];
        const double orig = w;
        w = orig + h;
        nn::forward(m, x, fw, false);
        const double lp = nn::cross_entropy(fw.logits, labels);
        w = orig - h;
        nn::forward(m, x, fw, false);
        const double lm = nn::cross_entropy(fw.logits, labels);
        w = orig;
        const double fd = (lp - lm) / (2 * h);
        const double an = g.weight[li].data[wi];
        if (std::abs(fd) > 1e-8)
            CHECK(std::abs(an - fd) / std::max(std::abs(fd), std::abs(an)) < 1e-4);
    }
}

TEST_CASE("conv gradients match central differences") {
    nn::Rng rng(21);
    Model m = nn::make_cnn(8, 8, 3, 4, 3, 3, rng);
    nn::Rng brng(22);
    Tensor x({4, 1, 8, 8});
    for (auto& v : x.data) v = brng.uniform();
    const auto labels = random_labels(4, 3, brng);

    Forward fw;
    nn::forward(m, x, fw, false);
    const auto g = nn::backward(m, fw, nn::cross_entropy_grad(fw.logits, labels), false);

    nn::Rng pick(23);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t li = pick.below(static_cast<uint32_t>(m.layers.size()));
        const size_t wi = pick.below(static_cast<uint32_t>(m.layers[li].weight.size()));
        const double h = 1e-6;
        double& w = m.layers[li].weight.data[wi];
        const double orig = w;
        w = orig + h;
        nn::forward(m, x, fw, false);
        const double lp = nn::cross_entropy(fw.logits, labels);
        w = orig - h;
        nn::forward(m, x, fw, false);
        const double lm = nn::cross_entropy(fw.logits, labels);
        w = orig;
        const double fd = (lp - lm) / (2 * h);
        const double an = g.weight[li].data[wi];
        if (std::abs(fd) > 1e-8)
            CHECK(std::abs(an - fd) / std::max(std::abs(fd), std::abs(an)) < 1e-4);
    }
}

TEST_CASE("straight-through estimator passes gradients and respects the clip") {
    Model m = quantized_mlp(3, 4, 2, rccm::Arch::ThreeAdd, 31);
    // push one weight outside the clip range
    m.layers[0].weight.data[0] = m.layers[0].clip * 2.0;
    nn::Rng brng(32);
    const Tensor x = random_batch(6, 3, brng);
    const auto labels = random_labels(6, 2, brng);
    Forward fw;
    nn::forward(m, x, fw, true);
    const auto g = nn::backward(m, fw, nn::cross_entropy_grad(fw.logits, labels), true);
    CHECK(g.weight[0].data[0] == 0.0);

    // zero upstream gradient means zero scale gradient
    Tensor zero_grad(fw.logits.shape);
    const auto gz = nn::backward(m, fw, zero_grad, true);
    for (double dl : gz.lambda) CHECK(dl == 0.0);
}

TEST_CASE("layer quantized entirely to zero has zero scale gradient") {
    Model m = quantized_mlp(3, 4, 2, rccm::Arch::TwoAdd, 41);
    // shrink weights far below the smallest representable magnitude
    for (auto& w : m.layers[0].weight.data) w *= 1e-9;
    nn::Rng brng(42);
    const Tensor x = random_batch(5, 3, brng);
    const auto labels = random_labels(5, 2, brng);
    Forward fw;
    nn::forward(m, x, fw, true);
    for (double c : fw.coeffs[0].data) CHECK(c == 0.0);
    const auto g = nn::backward(m, fw, nn::cross_entropy_grad(fw.logits, labels), true);
    CHECK(g.lambda[0] == 0.0);
}

TEST_CASE("scale gradient matches central differences away from boundaries") {
    // Activation quantization is off here: its staircase makes the true
    // loss locally constant in lambda, which no finite difference can see.
    // The straight-through surrogate is checked against the smooth chain.
    Model m = quantized_mlp(4, 5, 3, rccm::Arch::ThreeAdd, 51);
    for (auto& l : m.layers) l.act_quant = false;
    nn::Rng brng(52);
    const Tensor x = random_batch(8, 4, brng);
    const auto labels = random_labels(8, 3, brng);

    for (size_t li = 0; li < m.layers.size(); ++li) {
        const double h = m.layers[li].lambda * 1e-6;
        // skip the check if any weight's selection would flip within +-8h
        bool near_boundary = false;
        const auto& l = m.layers[li];
        for (double w : l.weight.data) {
            const auto base = quant::nearest_value(w, l.lambda, l.clip, l.positive_coeffs,
                                                   l.has_zero);
            for (double d : {-8.0, 8.0})
                if (quant::nearest_value(w, l.lambda + d * h, l.clip, l.positive_coeffs,
                                         l.has_zero)
                        .coefficient != base.coefficient)
                    near_boundary = true;
        }
        if (near_boundary) continue;

        Forward fw;
        nn::forward(m, x, fw, true);
        const auto g = nn::backward(m, fw, nn::cross_entropy_grad(fw.logits, labels), true);

        const double orig = m.layers[li].lambda;
        m.layers[li].lambda = orig + h;
        nn::forward(m, x, fw, true);
        const double lp = nn::cross_entropy(fw.logits, labels);
        m.layers[li].lambda = orig - h;
        nn::forward(m, x, fw, true);
        const double lm = nn::cross_entropy(fw.logits, labels);
        m.layers[li].lambda = orig;

        const double fd = (lp - lm) / (2 * h);
        const double an = g.lambda[li];
        if (std::abs(fd) > 1e-7)
            CHECK(std::abs(an - fd) / std::max(std::abs(fd), std::abs(an)) < 1e-3);
    }
}

TEST_CASE("quantized forward equals an integer evaluation through the multiplier") {
    for (auto arch : {rccm::Arch::TwoAdd, rccm::Arch::ThreeAdd}) {
        Model m = quantized_mlp(5, 7, 3, arch, 61);
        nn::Rng brng(62);
        const Tensor x = random_batch(9, 5, brng);
        Forward fw;
        nn::forward(m, x, fw, true);

        // integer-path oracle: index-encode each weight, multiply integer
        // activation codes through eval(), rescale identically
        const uint32_t batch = 9;
        Tensor codes(x.shape);
        for (uint64_t i = 0; i < x.size(); ++i)
            codes.data[i] =
                static_cast<double>(quant::activation_code(x.data[i], m.input_fmt));
        double scale = std::ldexp(1.0, -m.input_fmt.frac_bits);

        Tensor cur = codes;
        for (size_t li = 0; li < m.layers.size(); ++li) {
            const auto& l = m.layers[li];
            const uint32_t in = l.weight.shape[1];
            const uint32_t out = l.weight.shape[0];
            Tensor z({batch, out});
            for (uint32_t b = 0; b < batch; ++b)
                for (uint32_t o = 0; o < out; ++o) {
                    int64_t acc = 0;
                    for (uint32_t i = 0; i < in; ++i) {
                        const double w = l.weight.data[static_cast<uint64_t>(o) * in + i];
                        const auto n = quant::nearest_value(w, l.lambda, l.clip,
                                                            l.positive_coeffs, l.has_zero);
                        const auto sel = rccm::select_for(l.config, n.coefficient);
                        REQUIRE(sel.has_value());
                        acc += rccm::eval(l.config, *sel,
                                          static_cast<int64_t>(
                                              cur.data[static_cast<uint64_t>(b) * in + i]));
                    }
                    z.data[static_cast<uint64_t>(b) * out + o] =
                        l.lambda * (scale * static_cast<double>(acc));
                }
            if (!l.activation) {
                cur = z;
                break;
            }
            Tensor next({batch, out});
            for (uint64_t i = 0; i < z.size(); ++i)
                next.data[i] = static_cast<double>(
                    quant::activation_code(std::max(0.0, z.data[i]), l.act_fmt));
            scale = std::ldexp(1.0, -l.act_fmt.frac_bits);
            cur = next;
        }
        REQUIRE(cur.size() == fw.logits.size());
        for (uint64_t i = 0; i < cur.size(); ++i) CHECK(cur.data[i] == fw.logits.data[i]);
    }
}
