#include "addnet/addnet.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "core/cost.hpp"
#include "core/enumerate.hpp"
#include "core/error.hpp"
#include "core/formats.hpp"
#include "core/match.hpp"
#include "core/netlist.hpp"
#include "core/nn.hpp"
#include "core/quantize.hpp"
#include "core/rccm.hpp"
#include "core/train.hpp"

using namespace addnet;

namespace {

thread_local std::string g_last_error;

addnet_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return ADDNET_ERR_INVALID_ARGUMENT;
        case ErrorCode::out_of_range: return ADDNET_ERR_OUT_OF_RANGE;
        case ErrorCode::not_found: return ADDNET_ERR_NOT_FOUND;
        case ErrorCode::data: return ADDNET_ERR_DATA;
        case ErrorCode::io: return ADDNET_ERR_IO;
        case ErrorCode::parse: return ADDNET_ERR_PARSE;
        case ErrorCode::internal: return ADDNET_ERR_INTERNAL;
    }
    return ADDNET_ERR_INTERNAL;
}

template <typename Fn>
addnet_status guarded(Fn&& fn) {
    try {
        fn();
        return ADDNET_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ADDNET_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ADDNET_ERR_INTERNAL;
    }
}

addnet_status bad_arg(const char* msg) {
    g_last_error = msg;
    return ADDNET_ERR_INVALID_ARGUMENT;
}

rccm::Arch to_arch(addnet_arch arch) {
    switch (arch) {
        case ADDNET_ARCH_2ADD: return rccm::Arch::TwoAdd;
        case ADDNET_ARCH_3ADD: return rccm::Arch::ThreeAdd;
        case ADDNET_ARCH_4ADD: return rccm::Arch::FourAdd;
    }
    fail(ErrorCode::invalid_argument, "bad architecture value");
}

cost::MultKind to_kind(addnet_mult_kind kind) {
    switch (kind) {
        case ADDNET_MULT_GENERIC: return cost::MultKind::Generic;
        case ADDNET_MULT_2ADD: return cost::MultKind::TwoAdd;
        case ADDNET_MULT_3ADD: return cost::MultKind::ThreeAdd;
        case ADDNET_MULT_4ADD: return cost::MultKind::FourAdd;
    }
    fail(ErrorCode::invalid_argument, "bad multiplier kind");
}

enumeration::EnumerateOptions to_options(const addnet_enumerate_options* opt) {
    enumeration::EnumerateOptions out;
    if (!opt) return out;
    if (opt->phi_max > 0) out.phi_max = opt->phi_max;
    out.threads = opt->threads;
    if (opt->memory_cap_bytes) out.memory_cap_bytes = opt->memory_cap_bytes;
    if (opt->spill_dir) out.spill_dir = opt->spill_dir;
    if (opt->progress) {
        auto fn = opt->progress;
        auto user = opt->progress_user;
        out.progress = [fn, user](uint64_t done, uint64_t total) { fn(done, total, user); };
    }
    return out;
}

} // namespace

struct addnet_config {
    rccm::RccmConfig cfg;
};
struct addnet_catalog {
    enumeration::Catalog cat;
};
struct addnet_weights {
    std::vector<io::WeightsRecord> records;
};
struct addnet_histogram {
    matching::WeightHistogram hist;
};
struct addnet_match_result {
    matching::MatchResult res;
};
struct addnet_encoded {
    std::vector<quant::EncodedLayer> layers;
};
struct addnet_train_result {
    train::TrainResult res;
    bool quantized = false;
};
struct addnet_netlist {
    netlist::Netlist nl;
};

extern "C" {

const char* addnet_version(void) { return "0.1.0"; }

const char* addnet_last_error(void) { return g_last_error.c_str(); }

/* ---------- configs ---------- */

addnet_status addnet_config_optimized(addnet_arch arch, addnet_config** out) {
    if (!out) return bad_arg("out is null");
    return guarded([&] { *out = new addnet_config{rccm::optimized_config(to_arch(arch))}; });
}

addnet_status addnet_config_create(addnet_arch arch, const int* cells_a, const int* cell_b,
                                   addnet_config** out) {
    if (!out || !cells_a || !cell_b) return bad_arg("null argument");
    return guarded([&] {
        rccm::RccmConfig cfg;
        cfg.arch = to_arch(arch);
        const int n = rccm::cell_a_count(cfg.arch);
        for (int c = 0; c < n; ++c) {
            const int* g = cells_a + 5 * c;
            if (g[0] < 0 || g[0] > 3)
                fail(ErrorCode::invalid_argument, "mux mapping must be in [0, 3]");
            rccm::CellConfigA cell;
            cell.mapping = static_cast<rccm::MuxMapping>(g[0]);
            for (int i = 0; i < 4; ++i) {
                if (g[1 + i] < 0) fail(ErrorCode::invalid_argument, "negative shift");
                cell.shifts[static_cast<size_t>(i)] = static_cast<uint8_t>(g[1 + i]);
            }
            cfg.cells_a.push_back(cell);
        }
        for (int i = 0; i < 3; ++i) {
            if (cell_b[i] < 0) fail(ErrorCode::invalid_argument, "negative shift");
            cfg.cell_b.shifts[static_cast<size_t>(i)] = static_cast<uint8_t>(cell_b[i]);
        }
        rccm::validate(cfg);
        *out = new addnet_config{std::move(cfg)};
    });
}

void addnet_config_destroy(addnet_config* cfg) { delete cfg; }

int addnet_config_select_width(const addnet_config* cfg) {
    return cfg ? rccm::select_width(cfg->cfg.arch) : 0;
}

addnet_status addnet_config_eval(const addnet_config* cfg, uint32_t select, int64_t x,
                                 int64_t* out) {
    if (!cfg || !out) return bad_arg("null argument");
    return guarded([&] { *out = rccm::eval(cfg->cfg, select, x); });
}

addnet_status addnet_config_coefficient(const addnet_config* cfg, uint32_t select,
                                        int64_t* out) {
    if (!cfg || !out) return bad_arg("null argument");
    return guarded([&] { *out = rccm::coefficient_of(cfg->cfg, select); });
}

addnet_status addnet_config_coefficients(const addnet_config* cfg, int32_t* buf, size_t cap,
                                         size_t* count) {
    if (!cfg || !count) return bad_arg("null argument");
    return guarded([&] {
        const auto set = rccm::coefficient_set(cfg->cfg);
        *count = set.size();
        if (buf) {
            if (cap < set.size()) fail(ErrorCode::invalid_argument, "buffer too small");
            std::copy(set.begin(), set.end(), buf);
        }
    });
}

addnet_status addnet_config_select_for(const addnet_config* cfg, int64_t coefficient,
                                       uint32_t* select) {
    if (!cfg || !select) return bad_arg("null argument");
    return guarded([&] {
        const auto s = rccm::select_for(cfg->cfg, coefficient);
        if (!s) fail(ErrorCode::not_found, "coefficient not reachable by this config");
        *select = *s;
    });
}

/* ---------- enumeration ---------- */

void addnet_enumerate_defaults(addnet_enumerate_options* opt) {
    if (!opt) return;
    std::memset(opt, 0, sizeof *opt);
    opt->phi_max = 3;
}

addnet_status addnet_enumerate(addnet_arch arch, const addnet_enumerate_options* opt,
                               addnet_catalog** out) {
    if (!out) return bad_arg("out is null");
    return guarded([&] {
        *out = new addnet_catalog{enumeration::enumerate_sets(to_arch(arch), to_options(opt))};
    });
}

addnet_status addnet_count_sets(addnet_arch arch, const addnet_enumerate_options* opt,
                                uint64_t* unique_sets, uint64_t* candidates) {
    if (!unique_sets) return bad_arg("unique_sets is null");
    return guarded([&] {
        const auto res = enumeration::count_unique_sets(to_arch(arch), to_options(opt));
        *unique_sets = res.unique_sets;
        if (candidates) *candidates = res.candidates;
    });
}

addnet_status addnet_enumerate_to_file(addnet_arch arch, const addnet_enumerate_options* opt,
                                       const char* path, uint64_t* unique_sets) {
    if (!path) return bad_arg("path is null");
    return guarded([&] {
        const auto options = to_options(opt);
        io::CatalogWriter writer(path, to_arch(arch), options.phi_max,
                                 enumeration::kGeneratorTag, "streamed");
        const uint64_t n = enumeration::enumerate_stream(
            to_arch(arch), options,
            [&](const rccm::CoefficientSet& set) { writer.add(set); });
        writer.finish();
        if (unique_sets) *unique_sets = n;
    });
}

addnet_status addnet_catalog_load(const char* path, addnet_catalog** out) {
    if (!path || !out) return bad_arg("null argument");
    return guarded([&] { *out = new addnet_catalog{io::load_catalog(path)}; });
}

addnet_status addnet_catalog_save(const addnet_catalog* cat, const char* path) {
    if (!cat || !path) return bad_arg("null argument");
    return guarded([&] { io::save_catalog(cat->cat, path); });
}

void addnet_catalog_destroy(addnet_catalog* cat) { delete cat; }

size_t addnet_catalog_size(const addnet_catalog* cat) { return cat ? cat->cat.entries.size() : 0; }

addnet_status addnet_catalog_coefficients(const addnet_catalog* cat, size_t index, int32_t* buf,
                                          size_t cap, size_t* count) {
    if (!cat || !count) return bad_arg("null argument");
    return guarded([&] {
        if (index >= cat->cat.entries.size())
            fail(ErrorCode::out_of_range, "catalog index out of range");
        const auto& coeffs = cat->cat.entries[index].coefficients;
        *count = coeffs.size();
        if (buf) {
            if (cap < coeffs.size()) fail(ErrorCode::invalid_argument, "buffer too small");
            std::copy(coeffs.begin(), coeffs.end(), buf);
        }
    });
}

addnet_status addnet_catalog_set_id(const addnet_catalog* cat, size_t index, char* buf,
                                    size_t cap) {
    if (!cat || !buf) return bad_arg("null argument");
    return guarded([&] {
        if (index >= cat->cat.entries.size())
            fail(ErrorCode::out_of_range, "catalog index out of range");
        const std::string id = io::set_id(cat->cat.entries[index].coefficients);
        if (cap < id.size() + 1) fail(ErrorCode::invalid_argument, "buffer too small");
        std::memcpy(buf, id.c_str(), id.size() + 1);
    });
}

addnet_status addnet_catalog_config(const addnet_catalog* cat, size_t index,
                                    addnet_config** out) {
    if (!cat || !out) return bad_arg("null argument");
    return guarded([&] {
        if (index >= cat->cat.entries.size())
            fail(ErrorCode::out_of_range, "catalog index out of range");
        *out = new addnet_config{cat->cat.entries[index].witness};
    });
}

addnet_status addnet_catalog_find(const addnet_catalog* cat, const int32_t* coefficients,
                                  size_t n, int* found, size_t* index) {
    if (!cat || !coefficients || !found) return bad_arg("null argument");
    return guarded([&] {
        const std::span<const int32_t> span(coefficients, n);
        *found = enumeration::contains(cat->cat, span) ? 1 : 0;
        if (*found && index) {
            for (size_t i = 0; i < cat->cat.entries.size(); ++i)
                if (std::equal(span.begin(), span.end(),
                               cat->cat.entries[i].coefficients.begin(),
                               cat->cat.entries[i].coefficients.end())) {
                    *index = i;
                    break;
                }
        }
    });
}

/* ---------- weights and histograms ---------- */

addnet_status addnet_weights_create(addnet_weights** out) {
    if (!out) return bad_arg("out is null");
    return guarded([&] { *out = new addnet_weights; });
}

addnet_status addnet_weights_add(addnet_weights* w, const char* name, const uint32_t* shape,
                                 size_t rank, const float* values) {
    if (!w || !name || !shape || !values) return bad_arg("null argument");
    return guarded([&] {
        io::WeightsRecord rec;
        rec.name = name;
        uint64_t n = 1;
        for (size_t i = 0; i < rank; ++i) {
            rec.shape.push_back(shape[i]);
            n *= shape[i];
        }
        rec.values.assign(values, values + n);
        w->records.push_back(std::move(rec));
    });
}

addnet_status addnet_weights_load(const char* path, addnet_weights** out) {
    if (!path || !out) return bad_arg("null argument");
    return guarded([&] { *out = new addnet_weights{io::load_weights(path)}; });
}

addnet_status addnet_weights_save(const addnet_weights* w, const char* path) {
    if (!w || !path) return bad_arg("null argument");
    return guarded([&] { io::save_weights(w->records, path); });
}

void addnet_weights_destroy(addnet_weights* w) { delete w; }

size_t addnet_weights_count(const addnet_weights* w) { return w ? w->records.size() : 0; }

addnet_status addnet_histogram_build(const addnet_weights* w, int bins, addnet_histogram** out) {
    if (!w || !out) return bad_arg("null argument");
    return guarded([&] {
        std::vector<double> pooled;
        for (const auto& rec : w->records)
            for (float v : rec.values) pooled.push_back(v);
        *out = new addnet_histogram{
            matching::histogram(pooled, bins > 0 ? bins : matching::kDefaultBins)};
    });
}

void addnet_histogram_destroy(addnet_histogram* h) { delete h; }

addnet_status addnet_histogram_counts(const addnet_histogram* h, uint64_t* buf, size_t cap,
                                      size_t* bins) {
    if (!h || !bins) return bad_arg("null argument");
    return guarded([&] {
        *bins = h->hist.counts.size();
        if (buf) {
            if (cap < h->hist.counts.size())
                fail(ErrorCode::invalid_argument, "buffer too small");
            std::copy(h->hist.counts.begin(), h->hist.counts.end(), buf);
        }
    });
}

/* ---------- matching ---------- */

addnet_status addnet_match(const addnet_catalog* cat, const addnet_histogram* h,
                           addnet_match_result** out) {
    if (!cat || !h || !out) return bad_arg("null argument");
    return guarded([&] {
        *out = new addnet_match_result{matching::distribution_match(cat->cat, h->hist)};
    });
}

void addnet_match_result_destroy(addnet_match_result* m) { delete m; }

size_t addnet_match_ranked_count(const addnet_match_result* m) {
    return m ? m->res.ranked.size() : 0;
}

addnet_status addnet_match_ranked(const addnet_match_result* m, size_t rank, size_t* entry,
                                  double* score) {
    if (!m) return bad_arg("null argument");
    return guarded([&] {
        if (rank >= m->res.ranked.size()) fail(ErrorCode::out_of_range, "rank out of range");
        if (entry) *entry = m->res.ranked[rank].entry;
        if (score) *score = m->res.ranked[rank].score;
    });
}

size_t addnet_match_chosen(const addnet_match_result* m) { return m ? m->res.chosen : 0; }

addnet_status addnet_match_save(const addnet_catalog* cat, const addnet_match_result* m,
                                const char* path, const char* csv_path) {
    if (!cat || !m || !path) return bad_arg("null argument");
    return guarded([&] {
        io::save_match_report(cat->cat, m->res, path);
        if (csv_path) io::save_match_csv(cat->cat, m->res, csv_path);
    });
}

addnet_status addnet_kl_score(const addnet_histogram* h, const int32_t* coefficients, size_t n,
                              double eps, double* out) {
    if (!h || !coefficients || !out) return bad_arg("null argument");
    return guarded([&] {
        const auto dist = matching::set_distribution(std::span(coefficients, n), h->hist,
                                                     eps > 0 ? eps : 1e-6);
        *out = matching::kl_divergence(h->hist, dist);
    });
}

/* ---------- quantization ---------- */

addnet_status addnet_quantize_weights(const addnet_weights* w, const addnet_config* cfg,
                                      addnet_encoded** out) {
    if (!w || !cfg || !out) return bad_arg("null argument");
    return guarded([&] {
        const auto set = rccm::make_coefficient_set(cfg->cfg);
        auto enc = std::make_unique<addnet_encoded>();
        for (const auto& rec : w->records) {
            double range = 0.0;
            for (float v : rec.values) range = std::max(range, std::abs(double(v)));
            if (range == 0.0) range = 1e-3;
            const auto scheme = quant::make_scheme_for_range(set, range);
            std::vector<double> values(rec.values.begin(), rec.values.end());
            enc->layers.push_back(quant::encode_layer(rec.name, rec.shape, values, scheme));
        }
        *out = enc.release();
    });
}

addnet_status addnet_encoded_save(const addnet_encoded* e, const char* path) {
    if (!e || !path) return bad_arg("null argument");
    return guarded([&] { io::save_encoded(e->layers, path); });
}

addnet_status addnet_encoded_load(const char* path, addnet_encoded** out) {
    if (!path || !out) return bad_arg("null argument");
    return guarded([&] { *out = new addnet_encoded{io::load_encoded(path)}; });
}

void addnet_encoded_destroy(addnet_encoded* e) { delete e; }

size_t addnet_encoded_count(const addnet_encoded* e) { return e ? e->layers.size() : 0; }

addnet_status addnet_encoded_decode(const addnet_encoded* e, addnet_weights** out) {
    if (!e || !out) return bad_arg("null argument");
    return guarded([&] {
        auto w = std::make_unique<addnet_weights>();
        for (const auto& layer : e->layers) {
            io::WeightsRecord rec;
            rec.name = layer.name;
            rec.shape = layer.shape;
            for (double v : quant::decode_layer(layer))
                rec.values.push_back(static_cast<float>(v));
            w->records.push_back(std::move(rec));
        }
        *out = w.release();
    });
}

addnet_status addnet_quantize_value(const addnet_config* cfg, double lambda, double clip,
                                    double w, double* value, uint32_t* select) {
    if (!cfg || !value) return bad_arg("null argument");
    return guarded([&] {
        const auto set = rccm::make_coefficient_set(cfg->cfg);
        const auto scheme = quant::make_scheme(set, lambda, clip);
        const auto q = quant::quantize_weight(w, scheme);
        *value = q.value;
        if (select) *select = q.select;
    });
}

addnet_status addnet_activation_quantize(double x, int total_bits, int frac_bits, double* out) {
    if (!out) return bad_arg("out is null");
    return guarded(
        [&] { *out = quant::quantize_activation(x, {total_bits, frac_bits}); });
}

/* ---------- training ---------- */

void addnet_train_defaults(addnet_train_options* opt) {
    if (!opt) return;
    std::memset(opt, 0, sizeof *opt);
    opt->task = "blobs";
    opt->classes = 3;
    opt->train_samples = 3000;
    opt->test_samples = 4000;
    opt->dim = 8;
    opt->hidden = 32;
    opt->epochs = 40;
    opt->batch = 32;
    opt->lr = 0.1;
    opt->lr_decay = 0.98;
    opt->momentum = 0.0;
    opt->lambda_lr = 0.001;
    opt->seed = 1;
    opt->quantize_arch = -1;
    opt->first_last_4add = 0;
}

addnet_status addnet_train_run(const addnet_train_options* opt, addnet_train_result** out) {
    if (!opt || !out) return bad_arg("null argument");
    return guarded([&] {
        train::TaskSpec task;
        const auto kind = train::task_kind_from_name(opt->task ? opt->task : "blobs");
        if (!kind) fail(ErrorCode::invalid_argument, "unknown task");
        task.kind = *kind;
        if (opt->classes) task.classes = opt->classes;
        if (opt->train_samples) task.train_samples = opt->train_samples;
        if (opt->test_samples) task.test_samples = opt->test_samples;
        if (opt->dim) task.dim = opt->dim;
        task.seed = opt->seed;

        train::TrainConfig config;
        config.epochs = opt->epochs;
        config.batch = opt->batch ? opt->batch : 32;
        config.lr = opt->lr > 0 ? opt->lr : 0.1;
        config.lr_decay = opt->lr_decay > 0 ? opt->lr_decay : 1.0;
        config.momentum = opt->momentum;
        config.lambda_lr = opt->lambda_lr > 0 ? opt->lambda_lr : 0.001;
        config.seed = opt->seed;

        auto model = train::make_model(task, opt->hidden ? opt->hidden : 32, opt->seed);
        auto pre = train::pretrain_float(std::move(model), task, config);
        auto result = std::make_unique<addnet_train_result>();
        if (opt->quantize_arch < 0) {
            result->res = std::move(pre);
        } else {
            const auto arch = to_arch(static_cast<addnet_arch>(opt->quantize_arch));
            const auto set = rccm::make_coefficient_set(rccm::optimized_config(arch));
            const auto four =
                rccm::make_coefficient_set(rccm::optimized_config(rccm::Arch::FourAdd));
            std::vector<rccm::CoefficientSet> sets(pre.model.layers.size(), set);
            if (opt->first_last_4add && !sets.empty()) {
                sets.front() = four;
                sets.back() = four;
            }
            result->res = train::train_quantized(std::move(pre.model), task, config, sets);
            result->quantized = true;
        }
        *out = result.release();
    });
}

void addnet_train_result_destroy(addnet_train_result* r) { delete r; }

double addnet_train_final_accuracy(const addnet_train_result* r) {
    return r ? r->res.final_test_accuracy : 0.0;
}

size_t addnet_train_epochs(const addnet_train_result* r) {
    return r ? r->res.history.size() : 0;
}

addnet_status addnet_train_metric(const addnet_train_result* r, size_t epoch, double* loss,
                                  double* train_acc, double* test_acc) {
    if (!r) return bad_arg("null argument");
    return guarded([&] {
        if (epoch >= r->res.history.size()) fail(ErrorCode::out_of_range, "epoch out of range");
        const auto& em = r->res.history[epoch];
        if (loss) *loss = em.loss;
        if (train_acc) *train_acc = em.train_accuracy;
        if (test_acc) *test_acc = em.test_accuracy;
    });
}

addnet_status addnet_train_save(const addnet_train_result* r, const char* dir) {
    if (!r || !dir) return bad_arg("null argument");
    return guarded([&] {
        const std::filesystem::path base(dir);
        std::filesystem::create_directories(base);
        std::vector<io::WeightsRecord> records;
        for (const auto& l : r->res.model.layers) {
            io::WeightsRecord rec;
            rec.name = l.name;
            rec.shape = l.weight.shape;
            for (double v : l.weight.data) rec.values.push_back(static_cast<float>(v));
            records.push_back(std::move(rec));
        }
        io::save_weights(records, base / "weights.bin");
        io::save_metrics(r->res.history, base / "metrics.txt");
        if (r->quantized)
            io::save_encoded(train::export_encoded(r->res.model), base / "encoded.bin");
    });
}

/* ---------- cost model ---------- */

addnet_status addnet_lut_cost(addnet_mult_kind kind, int w_in, double* luts, int* extrapolated) {
    if (!luts) return bad_arg("luts is null");
    return guarded([&] {
        const auto est = cost::lut_cost(to_kind(kind), w_in);
        *luts = est.luts;
        if (extrapolated) *extrapolated = est.extrapolated ? 1 : 0;
    });
}

int addnet_index_bits(addnet_mult_kind kind) {
    switch (kind) {
        case ADDNET_MULT_GENERIC: return 8;
        case ADDNET_MULT_2ADD: return 4;
        case ADDNET_MULT_3ADD: return 6;
        case ADDNET_MULT_4ADD: return 8;
    }
    return 0;
}

addnet_status addnet_bram_estimate(uint64_t weights_per_pe, int bits_per_weight,
                                   int parallelism, double* brams) {
    if (!brams) return bad_arg("brams is null");
    return guarded(
        [&] { *brams = cost::bram_estimate(weights_per_pe, bits_per_weight, parallelism); });
}

double addnet_layer_memory_mb(uint64_t weight_count, int bits_per_weight) {
    return cost::layer_memory_mb(weight_count, bits_per_weight < 0 ? 0 : bits_per_weight);
}

addnet_status addnet_cost_report(const addnet_layer_spec* layers, size_t n,
                                 addnet_mult_kind kind, int w_in, const char* path,
                                 const char* csv_path) {
    if (!path || (n > 0 && !layers)) return bad_arg("null argument");
    return guarded([&] {
        std::vector<cost::LayerSpec> specs;
        for (size_t i = 0; i < n; ++i)
            specs.push_back({layers[i].name ? layers[i].name : "layer",
                             layers[i].weight_count, layers[i].pes, layers[i].parallelism});
        const auto report = cost::network_report(specs, to_kind(kind), w_in > 0 ? w_in : 9);
        io::save_cost_report(report, path);
        if (csv_path) io::save_cost_csv(cost::CostParams::defaults(), csv_path);
    });
}

/* ---------- netlists ---------- */

addnet_status addnet_netlist_export(const addnet_config* cfg, const char* path) {
    if (!cfg || !path) return bad_arg("null argument");
    return guarded([&] { io::save_netlist(netlist::build(cfg->cfg), path); });
}

addnet_status addnet_netlist_load(const char* path, addnet_netlist** out) {
    if (!path || !out) return bad_arg("null argument");
    return guarded([&] { *out = new addnet_netlist{io::load_netlist(path)}; });
}

void addnet_netlist_destroy(addnet_netlist* nl) { delete nl; }

addnet_status addnet_netlist_simulate(const addnet_netlist* nl, uint32_t select, int64_t x,
                                      int64_t* out) {
    if (!nl || !out) return bad_arg("null argument");
    return guarded([&] { *out = netlist::simulate(nl->nl, select, x); });
}

} // extern "C"
