// Command-line front end; everything goes through the shared-library C API.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addnet/addnet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

[[noreturn]] void die(addnet_status status, const std::string& context) {
    std::fprintf(stderr, "addnet: %s: %s\n", context.c_str(), addnet_last_error());
    std::exit(status == ADDNET_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData);
}

void check(addnet_status status, const std::string& context) {
    if (status != ADDNET_OK) die(status, context);
}

addnet_arch parse_arch_flag(const std::string& name) {
    if (name == "2add") return ADDNET_ARCH_2ADD;
    if (name == "3add") return ADDNET_ARCH_3ADD;
    if (name == "4add") return ADDNET_ARCH_4ADD;
    std::fprintf(stderr, "addnet: unknown architecture '%s' (use 2add|3add|4add)\n",
                 name.c_str());
    std::exit(kExitUsage);
}

addnet_mult_kind parse_kind_flag(const std::string& name) {
    if (name == "generic") return ADDNET_MULT_GENERIC;
    if (name == "2add") return ADDNET_MULT_2ADD;
    if (name == "3add") return ADDNET_MULT_3ADD;
    if (name == "4add") return ADDNET_MULT_4ADD;
    std::fprintf(stderr, "addnet: unknown multiplier kind '%s'\n", name.c_str());
    std::exit(kExitUsage);
}

// Relative catalog paths fall back to $ADDNET_CATALOG_DIR when not found.
std::string resolve_catalog_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (fs::path(path).is_relative()) {
        if (const char* dir = std::getenv("ADDNET_CATALOG_DIR")) {
            const fs::path alt = fs::path(dir) / path;
            if (fs::exists(alt)) return alt.string();
        }
    }
    return path;
}

void print_progress(uint64_t done, uint64_t total, void*) {
    std::fprintf(stderr, "\r%" PRIu64 "/%" PRIu64 " units", done, total);
    if (done >= total) std::fprintf(stderr, "\n");
}

struct CatalogHandle {
    addnet_catalog* cat = nullptr;
    ~CatalogHandle() { addnet_catalog_destroy(cat); }
};

struct ConfigHandle {
    addnet_config* cfg = nullptr;
    ~ConfigHandle() { addnet_config_destroy(cfg); }
};

addnet_config* config_by_set_id(addnet_catalog* cat, const std::string& id) {
    char buf[17];
    for (size_t i = 0; i < addnet_catalog_size(cat); ++i) {
        check(addnet_catalog_set_id(cat, i, buf, sizeof buf), "reading set id");
        if (id == buf) {
            addnet_config* cfg = nullptr;
            check(addnet_catalog_config(cat, i, &cfg), "reading witness config");
            return cfg;
        }
    }
    std::fprintf(stderr, "addnet: set id %s not found in catalog\n", id.c_str());
    std::exit(kExitData);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AddNet reconfigurable constant-coefficient multiplier toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", addnet_version());

    // enumerate
    std::string en_arch = "2add", en_out, en_spill;
    int en_phi = 3;
    unsigned en_threads = 0;
    double en_cap_gb = 4.0;
    bool en_count_only = false, en_quiet = false;
    auto* en = app.add_subcommand("enumerate", "Enumerate all unique coefficient sets");
    en->add_option("--arch", en_arch, "Architecture: 2add|3add|4add")->required();
    en->add_option("--phi-max", en_phi, "Maximum per-operand shift (default 3)");
    en->add_option("--threads", en_threads, "Worker threads (0 = all cores)");
    en->add_option("--memory-cap-gb", en_cap_gb, "Dedup memory cap before disk spill");
    en->add_option("--spill-dir", en_spill, "Directory for spill files");
    en->add_option("--out", en_out, "Catalog file to write");
    en->add_flag("--count-only", en_count_only, "Only count unique sets");
    en->add_flag("--quiet", en_quiet, "Suppress progress output");

    // match
    std::string ma_catalog, ma_weights, ma_out, ma_csv;
    int ma_bins = 31;
    auto* ma = app.add_subcommand("match", "Rank catalog sets against a weight distribution");
    ma->add_option("--catalog", ma_catalog, "Catalog file")->required();
    ma->add_option("--weights", ma_weights, "Weights file")->required();
    ma->add_option("--bins", ma_bins, "Histogram bins (default 31)");
    ma->add_option("--out", ma_out, "Match report file")->required();
    ma->add_option("--csv", ma_csv, "Optional ranking CSV");

    // quantize
    std::string qu_weights, qu_out, qu_catalog, qu_set, qu_arch;
    auto* qu = app.add_subcommand("quantize", "Index-encode weights against a coefficient set");
    qu->add_option("--weights", qu_weights, "Weights file")->required();
    qu->add_option("--out", qu_out, "Encoded model file")->required();
    qu->add_option("--catalog", qu_catalog, "Catalog holding the set");
    qu->add_option("--set-id", qu_set, "Set id inside --catalog");
    qu->add_option("--arch", qu_arch, "Use the shipped optimized set of this architecture");

    // train
    addnet_train_options topt;
    addnet_train_defaults(&topt);
    std::string tr_task = "blobs", tr_arch = "float", tr_out;
    uint64_t tr_seed = 1;
    uint32_t tr_epochs = 40, tr_hidden = 32, tr_classes = 3;
    bool tr_first_last = false;
    auto* tr = app.add_subcommand("train", "Train on a built-in task");
    tr->add_option("--task", tr_task, "Task: blobs|digits");
    tr->add_option("--arch", tr_arch, "float or 2add|3add|4add");
    tr->add_option("--epochs", tr_epochs, "Training epochs");
    tr->add_option("--hidden", tr_hidden, "Hidden width (blobs MLP)");
    tr->add_option("--classes", tr_classes, "Class count");
    tr->add_option("--seed", tr_seed, "Deterministic seed");
    tr->add_option("--lr", topt.lr, "Learning rate");
    tr->add_option("--batch", topt.batch, "Batch size");
    tr->add_flag("--first-last-4add", tr_first_last,
                 "Quantize first and last layers with the 4add set");
    tr->add_option("--out", tr_out, "Output directory")->required();

    // report
    std::string re_kind = "2add", re_out, re_csv;
    int re_win = 9;
    std::vector<std::string> re_layers;
    auto* re = app.add_subcommand("report", "FPGA resource and memory estimates");
    re->add_option("--kind", re_kind, "Multiplier kind: generic|2add|3add|4add");
    re->add_option("--w-in", re_win, "Activation input width (default 9)");
    re->add_option("--layer", re_layers, "Layer spec name:weights:pes:parallelism (repeat)")
        ->required();
    re->add_option("--out", re_out, "Report file")->required();
    re->add_option("--csv", re_csv, "Optional LUT-vs-width CSV");

    // export
    std::string ex_arch, ex_catalog, ex_set, ex_out;
    auto* ex = app.add_subcommand("export", "Write an adder-graph netlist");
    ex->add_option("--arch", ex_arch, "Export the shipped optimized config of this arch");
    ex->add_option("--catalog", ex_catalog, "Catalog holding the config");
    ex->add_option("--set-id", ex_set, "Set id inside --catalog");
    ex->add_option("--out", ex_out, "Netlist file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (en->parsed()) {
        addnet_enumerate_options opt;
        addnet_enumerate_defaults(&opt);
        opt.phi_max = en_phi;
        opt.threads = en_threads;
        opt.memory_cap_bytes = static_cast<uint64_t>(en_cap_gb * (1ull << 30));
        opt.spill_dir = en_spill.empty() ? nullptr : en_spill.c_str();
        if (!en_quiet) opt.progress = print_progress;
        const addnet_arch arch = parse_arch_flag(en_arch);
        if (en_count_only || en_out.empty()) {
            uint64_t unique = 0, candidates = 0;
            check(addnet_count_sets(arch, &opt, &unique, &candidates), "enumerating");
            std::printf("arch %s phi-max %d unique-sets %" PRIu64 " candidates %" PRIu64 "\n",
                        en_arch.c_str(), en_phi, unique, candidates);
        } else {
            uint64_t unique = 0;
            check(addnet_enumerate_to_file(arch, &opt, en_out.c_str(), &unique), "enumerating");
            std::printf("arch %s phi-max %d unique-sets %" PRIu64 " -> %s\n", en_arch.c_str(),
                        en_phi, unique, en_out.c_str());
        }
        return kExitOk;
    }

    if (ma->parsed()) {
        CatalogHandle cat;
        check(addnet_catalog_load(resolve_catalog_path(ma_catalog).c_str(), &cat.cat),
              "loading catalog");
        addnet_weights* w = nullptr;
        check(addnet_weights_load(ma_weights.c_str(), &w), "loading weights");
        addnet_histogram* h = nullptr;
        const addnet_status hs = addnet_histogram_build(w, ma_bins, &h);
        addnet_weights_destroy(w);
        check(hs, "building histogram");
        addnet_match_result* m = nullptr;
        const addnet_status ms = addnet_match(cat.cat, h, &m);
        addnet_histogram_destroy(h);
        check(ms, "matching");
        check(addnet_match_save(cat.cat, m, ma_out.c_str(),
                                ma_csv.empty() ? nullptr : ma_csv.c_str()),
              "writing match report");
        const size_t chosen = addnet_match_chosen(m);
        char id[17];
        check(addnet_catalog_set_id(cat.cat, chosen, id, sizeof id), "reading chosen id");
        size_t count = 0;
        check(addnet_catalog_coefficients(cat.cat, chosen, nullptr, 0, &count),
              "reading chosen set");
        std::printf("chosen set %s (%zu coefficients) -> %s\n", id, count, ma_out.c_str());
        addnet_match_result_destroy(m);
        return kExitOk;
    }

    if (qu->parsed()) {
        ConfigHandle cfg;
        if (!qu_arch.empty()) {
            check(addnet_config_optimized(parse_arch_flag(qu_arch), &cfg.cfg),
                  "building config");
        } else if (!qu_catalog.empty() && !qu_set.empty()) {
            CatalogHandle cat;
            check(addnet_catalog_load(resolve_catalog_path(qu_catalog).c_str(), &cat.cat),
                  "loading catalog");
            cfg.cfg = config_by_set_id(cat.cat, qu_set);
        } else {
            std::fprintf(stderr, "addnet: quantize needs --arch or --catalog plus --set-id\n");
            return kExitUsage;
        }
        addnet_weights* w = nullptr;
        check(addnet_weights_load(qu_weights.c_str(), &w), "loading weights");
        addnet_encoded* enc = nullptr;
        const addnet_status qs = addnet_quantize_weights(w, cfg.cfg, &enc);
        addnet_weights_destroy(w);
        check(qs, "quantizing");
        check(addnet_encoded_save(enc, qu_out.c_str()), "writing encoded model");
        std::printf("encoded %zu layers at %d bits per weight -> %s\n",
                    addnet_encoded_count(enc), addnet_config_select_width(cfg.cfg),
                    qu_out.c_str());
        addnet_encoded_destroy(enc);
        return kExitOk;
    }

    if (tr->parsed()) {
        topt.task = tr_task.c_str();
        topt.classes = tr_classes;
        topt.hidden = tr_hidden;
        topt.epochs = tr_epochs;
        topt.seed = tr_seed;
        topt.first_last_4add = tr_first_last ? 1 : 0;
        topt.quantize_arch = tr_arch == "float" ? -1 : parse_arch_flag(tr_arch);
        addnet_train_result* r = nullptr;
        check(addnet_train_run(&topt, &r), "training");
        check(addnet_train_save(r, tr_out.c_str()), "saving model");
        std::printf("task %s arch %s final test accuracy %.4f -> %s\n", tr_task.c_str(),
                    tr_arch.c_str(), addnet_train_final_accuracy(r), tr_out.c_str());
        addnet_train_result_destroy(r);
        return kExitOk;
    }

    if (re->parsed()) {
        std::vector<addnet_layer_spec> specs;
        std::vector<std::string> names;
        names.reserve(re_layers.size());
        for (const auto& text : re_layers) {
            uint64_t weights = 0;
            int pes = 0, par = 0;
            const auto c1 = text.find(':');
            if (c1 == std::string::npos ||
                std::sscanf(text.c_str() + c1, ":%" PRIu64 ":%d:%d", &weights, &pes, &par) != 3) {
                std::fprintf(stderr, "addnet: bad --layer spec '%s'\n", text.c_str());
                return kExitUsage;
            }
            names.push_back(text.substr(0, c1));
            specs.push_back({names.back().c_str(), weights, pes, par});
        }
        check(addnet_cost_report(specs.data(), specs.size(), parse_kind_flag(re_kind), re_win,
                                 re_out.c_str(), re_csv.empty() ? nullptr : re_csv.c_str()),
              "writing cost report");
        std::printf("cost report (%s, w_in=%d, %zu layers) -> %s\n", re_kind.c_str(), re_win,
                    specs.size(), re_out.c_str());
        return kExitOk;
    }

    if (ex->parsed()) {
        ConfigHandle cfg;
        if (!ex_arch.empty()) {
            check(addnet_config_optimized(parse_arch_flag(ex_arch), &cfg.cfg),
                  "building config");
        } else if (!ex_catalog.empty() && !ex_set.empty()) {
            CatalogHandle cat;
            check(addnet_catalog_load(resolve_catalog_path(ex_catalog).c_str(), &cat.cat),
                  "loading catalog");
            cfg.cfg = config_by_set_id(cat.cat, ex_set);
        } else {
            std::fprintf(stderr, "addnet: export needs --arch or --catalog plus --set-id\n");
            return kExitUsage;
        }
        check(addnet_netlist_export(cfg.cfg, ex_out.c_str()), "writing netlist");
        std::printf("netlist -> %s\n", ex_out.c_str());
        return kExitOk;
    }

    return kExitUsage;
}
