#include "core/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace addnet::nn {

uint64_t Rng::next() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
}

uint32_t Rng::below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

namespace {

void init_weights(Tensor& w, uint32_t fan_in, Rng& rng) {
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (double& v : w.data) v = rng.normal() * scale;
}

} // namespace

Model make_mlp(uint32_t inputs, uint32_t hidden, uint32_t classes, Rng& rng) {
    Model m;
    m.input_size = inputs;
    m.classes = classes;

    Layer fc1;
    fc1.kind = LayerKind::Dense;
    fc1.name = "fc1";
    fc1.weight = Tensor({hidden, inputs});
    init_weights(fc1.weight, inputs, rng);

    Layer fc2;
    fc2.kind = LayerKind::Dense;
    fc2.name = "fc2";
    fc2.weight = Tensor({classes, hidden});
    init_weights(fc2.weight, hidden, rng);
    fc2.activation = false;

    m.layers = {std::move(fc1), std::move(fc2)};
    return m;
}

Model make_cnn(uint32_t in_h, uint32_t in_w, uint32_t conv1, uint32_t conv2, uint32_t kernel,
               uint32_t classes, Rng& rng) {
    Model m;
    m.input_size = in_h * in_w;
    m.classes = classes;

    Layer c1;
    c1.kind = LayerKind::Conv2d;
    c1.name = "conv1";
    c1.in_c = 1;
    c1.in_h = in_h;
    c1.in_w = in_w;
    c1.kernel = kernel;
    c1.weight = Tensor({conv1, 1, kernel, kernel});
    init_weights(c1.weight, kernel * kernel, rng);

    Layer c2;
    c2.kind = LayerKind::Conv2d;
    c2.name = "conv2";
    c2.in_c = conv1;
    c2.in_h = c1.out_h();
    c2.in_w = c1.out_w();
    c2.kernel = kernel;
    c2.weight = Tensor({conv2, conv1, kernel, kernel});
    init_weights(c2.weight, conv1 * kernel * kernel, rng);

    Layer fc;
    fc.kind = LayerKind::Dense;
    fc.name = "fc";
    fc.weight = Tensor({classes, conv2 * c2.out_h() * c2.out_w()});
    init_weights(fc.weight, fc.weight.shape[1], rng);
    fc.activation = false;

    m.layers = {std::move(c1), std::move(c2), std::move(fc)};
    return m;
}

namespace {

uint32_t layer_output_size(const Layer& l) {
    return l.kind == LayerKind::Dense ? l.fan_out() : l.fan_out() * l.out_h() * l.out_w();
}

uint32_t layer_input_size(const Layer& l) {
    return l.kind == LayerKind::Dense ? l.weight.shape[1] : l.in_c * l.in_h * l.in_w;
}

// z = lambda * (scale * (C . U)) over integer-valued doubles, or W . X on
// the float path.
void dense_forward(const Layer& l, const Tensor& x, const double* coeffs, double scale,
                   Tensor& z) {
    const uint32_t batch = x.shape[0];
    const uint32_t in = l.weight.shape[1];
    const uint32_t out = l.weight.shape[0];
    const double* w = coeffs ? coeffs : l.weight.data.data();
    for (uint32_t b = 0; b < batch; ++b) {
        const double* xrow = x.data.data() + static_cast<uint64_t>(b) * in;
        double* zrow = z.data.data() + static_cast<uint64_t>(b) * out;
        for (uint32_t o = 0; o < out; ++o) {
            const double* wrow = w + static_cast<uint64_t>(o) * in;
            double acc = 0.0;
            for (uint32_t i = 0; i < in; ++i) acc += wrow[i] * xrow[i];
            zrow[o] = coeffs ? l.lambda * (scale * acc) : acc;
        }
    }
}

void conv_forward(const Layer& l, const Tensor& x, const double* coeffs, double scale,
                  Tensor& z) {
    const uint32_t batch = x.shape[0];
    const uint32_t oh = l.out_h(), ow = l.out_w(), k = l.kernel;
    const uint32_t oc = l.fan_out(), ic = l.in_c;
    const double* w = coeffs ? coeffs : l.weight.data.data();
    for (uint32_t b = 0; b < batch; ++b) {
        const double* xb = x.data.data() + static_cast<uint64_t>(b) * ic * l.in_h * l.in_w;
        double* zb = z.data.data() + static_cast<uint64_t>(b) * oc * oh * ow;
        for (uint32_t o = 0; o < oc; ++o) {
            const double* wo = w + static_cast<uint64_t>(o) * ic * k * k;
            for (uint32_t oy = 0; oy < oh; ++oy)
                for (uint32_t ox = 0; ox < ow; ++ox) {
                    double acc = 0.0;
                    for (uint32_t c = 0; c < ic; ++c) {
                        const double* xc = xb + static_cast<uint64_t>(c) * l.in_h * l.in_w;
                        const double* wc = wo + static_cast<uint64_t>(c) * k * k;
                        for (uint32_t ky = 0; ky < k; ++ky)
                            for (uint32_t kx = 0; kx < k; ++kx)
                                acc += wc[ky * k + kx] * xc[(oy + ky) * l.in_w + (ox + kx)];
                    }
                    zb[(static_cast<uint64_t>(o) * oh + oy) * ow + ox] =
                        coeffs ? l.lambda * (scale * acc) : acc;
                }
        }
    }
}

} // namespace

void forward(const Model& model, const Tensor& batch_x, Forward& fw, bool quantize) {
    const uint32_t batch = batch_x.shape[0];
    const size_t n_layers = model.layers.size();
    fw.batch = batch;
    fw.inputs.assign(n_layers, {});
    fw.codes.assign(n_layers, {});
    fw.scales.assign(n_layers, 1.0);
    fw.pre.assign(n_layers, {});
    fw.coeffs.assign(n_layers, {});

    Tensor values = batch_x;
    Tensor codes;
    double scale = 1.0;
    bool have_codes = false;
    if (quantize) {
        codes = Tensor(batch_x.shape);
        scale = std::ldexp(1.0, -model.input_fmt.frac_bits);
        for (uint64_t i = 0; i < batch_x.size(); ++i)
            codes.data[i] =
                static_cast<double>(quant::activation_code(batch_x.data[i], model.input_fmt));
        for (uint64_t i = 0; i < batch_x.size(); ++i) values.data[i] = scale * codes.data[i];
        have_codes = true;
    }

    for (size_t li = 0; li < n_layers; ++li) {
        const Layer& l = model.layers[li];
        fw.inputs[li] = values;
        fw.scales[li] = scale;
        if (have_codes) fw.codes[li] = codes;

        Tensor z(l.kind == LayerKind::Dense
                     ? std::vector<uint32_t>{batch, l.fan_out()}
                     : std::vector<uint32_t>{batch, l.fan_out(), l.out_h(), l.out_w()});

        const bool qlayer = quantize && l.quantized;
        if (qlayer) {
            if (l.clip <= 0.0) fail(ErrorCode::invalid_argument, "layer clip not initialized");
            Tensor coeff(l.weight.shape);
            for (uint64_t i = 0; i < l.weight.size(); ++i)
                coeff.data[i] = static_cast<double>(
                    quant::nearest_value(l.weight.data[i], l.lambda, l.clip, l.positive_coeffs,
                                         l.has_zero)
                        .coefficient);
            fw.coeffs[li] = std::move(coeff);
            const Tensor& operand = have_codes ? codes : fw.inputs[li];
            const double in_scale = have_codes ? scale : 1.0;
            if (l.kind == LayerKind::Dense)
                dense_forward(l, operand, fw.coeffs[li].data.data(), in_scale, z);
            else
                conv_forward(l, operand, fw.coeffs[li].data.data(), in_scale, z);
        } else {
            if (l.kind == LayerKind::Dense)
                dense_forward(l, fw.inputs[li], nullptr, 1.0, z);
            else
                conv_forward(l, fw.inputs[li], nullptr, 1.0, z);
        }
        fw.pre[li] = z;

        if (!l.activation) {
            values = std::move(z);
            have_codes = false;
            scale = 1.0;
            continue;
        }
        // ReLU, then the activation quantizer when enabled.
        values = Tensor(z.shape);
        if (quantize && l.act_quant) {
            codes = Tensor(z.shape);
            scale = std::ldexp(1.0, -l.act_fmt.frac_bits);
            for (uint64_t i = 0; i < z.size(); ++i) {
                const double a = std::max(0.0, z.data[i]);
                codes.data[i] = static_cast<double>(quant::activation_code(a, l.act_fmt));
                values.data[i] = scale * codes.data[i];
            }
            have_codes = true;
        } else {
            for (uint64_t i = 0; i < z.size(); ++i) values.data[i] = std::max(0.0, z.data[i]);
            have_codes = false;
            scale = 1.0;
        }
    }
    fw.logits = std::move(values);
}

double cross_entropy(const Tensor& logits, std::span<const int32_t> labels) {
    const uint32_t batch = logits.shape[0];
    const uint32_t classes = logits.shape[1];
    double loss = 0.0;
    for (uint32_t b = 0; b < batch; ++b) {
        const double* row = logits.data.data() + static_cast<uint64_t>(b) * classes;
        double m = row[0];
        for (uint32_t c = 1; c < classes; ++c) m = std::max(m, row[c]);
        double sum = 0.0;
        for (uint32_t c = 0; c < classes; ++c) sum += std::exp(row[c] - m);
        loss += m + std::log(sum) - row[static_cast<uint32_t>(labels[b])];
    }
    return loss / batch;
}

Tensor cross_entropy_grad(const Tensor& logits, std::span<const int32_t> labels) {
    const uint32_t batch = logits.shape[0];
    const uint32_t classes = logits.shape[1];
    Tensor grad(logits.shape);
    for (uint32_t b = 0; b < batch; ++b) {
        const double* row = logits.data.data() + static_cast<uint64_t>(b) * classes;
        double* g = grad.data.data() + static_cast<uint64_t>(b) * classes;
        double m = row[0];
        for (uint32_t c = 1; c < classes; ++c) m = std::max(m, row[c]);
        double sum = 0.0;
        for (uint32_t c = 0; c < classes; ++c) sum += std::exp(row[c] - m);
        for (uint32_t c = 0; c < classes; ++c)
            g[c] = (std::exp(row[c] - m) / sum - (labels[b] == static_cast<int32_t>(c) ? 1 : 0)) /
                   batch;
    }
    return grad;
}

int32_t argmax_class(const Tensor& logits, uint32_t row) {
    const uint32_t classes = logits.shape[1];
    const double* r = logits.data.data() + static_cast<uint64_t>(row) * classes;
    int32_t best = 0;
    for (uint32_t c = 1; c < classes; ++c)
        if (r[c] > r[best]) best = static_cast<int32_t>(c);
    return best;
}

namespace {

void dense_backward(const Layer& l, const Forward& fw, size_t li, const Tensor& delta,
                    bool qlayer, Tensor& dw, double& dlambda, Tensor& dx) {
    const uint32_t batch = delta.shape[0];
    const uint32_t in = l.weight.shape[1];
    const uint32_t out = l.weight.shape[0];
    const Tensor& x = fw.inputs[li];
    for (uint32_t b = 0; b < batch; ++b) {
        const double* drow = delta.data.data() + static_cast<uint64_t>(b) * out;
        const double* xrow = x.data.data() + static_cast<uint64_t>(b) * in;
        double* dxrow = dx.data.data() + static_cast<uint64_t>(b) * in;
        for (uint32_t o = 0; o < out; ++o) {
            const double d = drow[o];
            if (d == 0.0) continue;
            double* dwrow = dw.data.data() + static_cast<uint64_t>(o) * in;
            for (uint32_t i = 0; i < in; ++i) dwrow[i] += d * xrow[i];
            const double* wrow =
                (qlayer ? fw.coeffs[li].data.data() : l.weight.data.data()) +
                static_cast<uint64_t>(o) * in;
            if (qlayer)
                for (uint32_t i = 0; i < in; ++i) dxrow[i] += d * (l.lambda * wrow[i]);
            else
                for (uint32_t i = 0; i < in; ++i) dxrow[i] += d * wrow[i];
        }
    }
    if (qlayer) {
        // dL/dq accumulated in dw so far; scale gradient before masking.
        for (uint64_t i = 0; i < dw.size(); ++i) dlambda += dw.data[i] * fw.coeffs[li].data[i];
    }
}

void conv_backward(const Layer& l, const Forward& fw, size_t li, const Tensor& delta,
                   bool qlayer, Tensor& dw, double& dlambda, Tensor& dx) {
    const uint32_t batch = delta.shape[0];
    const uint32_t oh = l.out_h(), ow = l.out_w(), k = l.kernel;
    const uint32_t oc = l.fan_out(), ic = l.in_c;
    const Tensor& x = fw.inputs[li];
    const double* w = qlayer ? fw.coeffs[li].data.data() : l.weight.data.data();
    for (uint32_t b = 0; b < batch; ++b) {
        const double* xb = x.data.data() + static_cast<uint64_t>(b) * ic * l.in_h * l.in_w;
        const double* db = delta.data.data() + static_cast<uint64_t>(b) * oc * oh * ow;
        double* dxb = dx.data.data() + static_cast<uint64_t>(b) * ic * l.in_h * l.in_w;
        for (uint32_t o = 0; o < oc; ++o) {
            const double* wo = w + static_cast<uint64_t>(o) * ic * k * k;
            double* dwo = dw.data.data() + static_cast<uint64_t>(o) * ic * k * k;
            for (uint32_t oy = 0; oy < oh; ++oy)
                for (uint32_t ox = 0; ox < ow; ++ox) {
                    const double d = db[(static_cast<uint64_t>(o) * oh + oy) * ow + ox];
                    if (d == 0.0) continue;
                    for (uint32_t c = 0; c < ic; ++c) {
                        const double* xc = xb + static_cast<uint64_t>(c) * l.in_h * l.in_w;
                        double* dxc = dxb + static_cast<uint64_t>(c) * l.in_h * l.in_w;
                        const double* wc = wo + static_cast<uint64_t>(c) * k * k;
                        double* dwc = dwo + static_cast<uint64_t>(c) * k * k;
                        for (uint32_t ky = 0; ky < k; ++ky)
                            for (uint32_t kx = 0; kx < k; ++kx) {
                                dwc[ky * k + kx] += d * xc[(oy + ky) * l.in_w + (ox + kx)];
                                const double wv = wc[ky * k + kx];
                                dxc[(oy + ky) * l.in_w + (ox + kx)] +=
                                    d * (qlayer ? l.lambda * wv : wv);
                            }
                    }
                }
        }
    }
    if (qlayer)
        for (uint64_t i = 0; i < dw.size(); ++i) dlambda += dw.data[i] * fw.coeffs[li].data[i];
}

} // namespace

Gradients backward(const Model& model, const Forward& fw, const Tensor& dlogits, bool quantize) {
    const size_t n_layers = model.layers.size();
    Gradients g;
    g.weight.resize(n_layers);
    g.lambda.assign(n_layers, 0.0);

    Tensor delta = dlogits;
    for (size_t li = n_layers; li-- > 0;) {
        const Layer& l = model.layers[li];
        const bool qlayer = quantize && l.quantized;
        g.weight[li] = Tensor(l.weight.shape);

        Tensor dx(l.kind == LayerKind::Dense
                      ? std::vector<uint32_t>{fw.batch, l.weight.shape[1]}
                      : std::vector<uint32_t>{fw.batch, l.in_c, l.in_h, l.in_w});
        if (l.kind == LayerKind::Dense)
            dense_backward(l, fw, li, delta, qlayer, g.weight[li], g.lambda[li], dx);
        else
            conv_backward(l, fw, li, delta, qlayer, g.weight[li], g.lambda[li], dx);

        if (qlayer) {
            // Clip straight-through: no update outside [-M, M].
            for (uint64_t i = 0; i < g.weight[li].size(); ++i)
                if (std::abs(l.weight.data[i]) > l.clip) g.weight[li].data[i] = 0.0;
        }

        if (li == 0) break;
        // Gradient through the previous layer's output stage.
        const Layer& prev = model.layers[li - 1];
        const Tensor& zprev = fw.pre[li - 1];
        if (prev.activation) {
            const double m = (quantize && prev.act_quant) ? prev.act_fmt.max_value()
                                                          : std::numeric_limits<double>::infinity();
            for (uint64_t i = 0; i < dx.size(); ++i) {
                const double z = zprev.data[i];
                if (z <= 0.0 || z > m) dx.data[i] = 0.0;
            }
        }
        delta = std::move(dx);
    }
    return g;
}

} // namespace addnet::nn
