// Exercises the shared-library surface exactly as an external consumer
// would: only the public C header, no core internals.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "addnet/addnet.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "addnet-capi-test";
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<int32_t> coefficients_of(addnet_config* cfg) {
    size_t n = 0;
    REQUIRE(addnet_config_coefficients(cfg, nullptr, 0, &n) == ADDNET_OK);
    std::vector<int32_t> out(n);
    REQUIRE(addnet_config_coefficients(cfg, out.data(), out.size(), &n) == ADDNET_OK);
    return out;
}

} // namespace

TEST_CASE("version and error text") {
    CHECK(addnet_version() != nullptr);
    int64_t out = 0;
    addnet_config* cfg = nullptr;
    REQUIRE(addnet_config_optimized(ADDNET_ARCH_2ADD, &cfg) == ADDNET_OK);
    CHECK(addnet_config_eval(cfg, 999, 1, &out) == ADDNET_ERR_OUT_OF_RANGE);
    CHECK(std::strlen(addnet_last_error()) > 0);
    addnet_config_destroy(cfg);
}

TEST_CASE("config evaluation through the C surface") {
    addnet_config* cfg = nullptr;
    REQUIRE(addnet_config_optimized(ADDNET_ARCH_2ADD, &cfg) == ADDNET_OK);
    CHECK(addnet_config_select_width(cfg) == 4);

    const auto set = coefficients_of(cfg);
    CHECK(set.size() == 15);
    CHECK(set.front() == -92);
    CHECK(set.back() == 92);

    int64_t y = 0;
    REQUIRE(addnet_config_eval(cfg, 2u | (3u << 2), 7, &y) == ADDNET_OK);
    CHECK(y == 92 * 7);

    uint32_t sel = 0;
    REQUIRE(addnet_config_select_for(cfg, 44, &sel) == ADDNET_OK);
    int64_t c = 0;
    REQUIRE(addnet_config_coefficient(cfg, sel, &c) == ADDNET_OK);
    CHECK(c == 44);
    CHECK(addnet_config_select_for(cfg, 3, &sel) == ADDNET_ERR_NOT_FOUND);

    // the same config built field by field agrees
    const int cells_a[5] = {0, 0, 1, 3, 2};
    const int cell_b[3] = {0, 3, 2};
    addnet_config* built = nullptr;
    REQUIRE(addnet_config_create(ADDNET_ARCH_2ADD, cells_a, cell_b, &built) == ADDNET_OK);
    CHECK(coefficients_of(built) == set);
    addnet_config_destroy(built);
    addnet_config_destroy(cfg);
}

TEST_CASE("enumeration, catalog files and membership") {
    TempDir tmp;
    addnet_enumerate_options opt;
    addnet_enumerate_defaults(&opt);
    opt.threads = 1;

    uint64_t unique = 0, candidates = 0;
    REQUIRE(addnet_count_sets(ADDNET_ARCH_2ADD, &opt, &unique, &candidates) == ADDNET_OK);
    CHECK(candidates > unique);

    addnet_catalog* cat = nullptr;
    REQUIRE(addnet_enumerate(ADDNET_ARCH_2ADD, &opt, &cat) == ADDNET_OK);
    CHECK(addnet_catalog_size(cat) == unique);

    addnet_config* cfg = nullptr;
    REQUIRE(addnet_config_optimized(ADDNET_ARCH_2ADD, &cfg) == ADDNET_OK);
    const auto table_set = coefficients_of(cfg);
    int found = 0;
    size_t index = 0;
    REQUIRE(addnet_catalog_find(cat, table_set.data(), table_set.size(), &found, &index) ==
            ADDNET_OK);
    CHECK(found == 1);
    char id[17];
    REQUIRE(addnet_catalog_set_id(cat, index, id, sizeof id) == ADDNET_OK);
    CHECK(std::strlen(id) == 16);
    addnet_config* witness = nullptr;
    REQUIRE(addnet_catalog_config(cat, index, &witness) == ADDNET_OK);
    CHECK(coefficients_of(witness) == table_set);
    addnet_config_destroy(witness);
    addnet_config_destroy(cfg);

    const fs::path path = tmp.path / "cat2add.txt";
    REQUIRE(addnet_catalog_save(cat, path.string().c_str()) == ADDNET_OK);
    addnet_catalog* loaded = nullptr;
    REQUIRE(addnet_catalog_load(path.string().c_str(), &loaded) == ADDNET_OK);
    CHECK(addnet_catalog_size(loaded) == unique);
    addnet_catalog_destroy(loaded);

    // streamed writer agrees on the count
    const fs::path streamed = tmp.path / "streamed.txt";
    uint64_t streamed_count = 0;
    REQUIRE(addnet_enumerate_to_file(ADDNET_ARCH_2ADD, &opt, streamed.string().c_str(),
                                     &streamed_count) == ADDNET_OK);
    CHECK(streamed_count == unique);
    addnet_catalog* loaded2 = nullptr;
    REQUIRE(addnet_catalog_load(streamed.string().c_str(), &loaded2) == ADDNET_OK);
    CHECK(addnet_catalog_size(loaded2) == unique);
    addnet_catalog_destroy(loaded2);

    addnet_catalog_destroy(cat);
}

TEST_CASE("weights, histogram, matching") {
    TempDir tmp;
    addnet_weights* w = nullptr;
    REQUIRE(addnet_weights_create(&w) == ADDNET_OK);
    std::vector<float> values;
    // rough bell shape around zero
    for (int i = -50; i <= 50; ++i)
        for (int r = 0; r < 100 / (1 + i * i / 80); ++r)
            values.push_back(static_cast<float>(i) / 100.f);
    const uint32_t shape[1] = {static_cast<uint32_t>(values.size())};
    REQUIRE(addnet_weights_add(w, "fc", shape, 1, values.data()) == ADDNET_OK);
    CHECK(addnet_weights_count(w) == 1);

    const fs::path path = tmp.path / "w.bin";
    REQUIRE(addnet_weights_save(w, path.string().c_str()) == ADDNET_OK);
    addnet_weights* loaded = nullptr;
    REQUIRE(addnet_weights_load(path.string().c_str(), &loaded) == ADDNET_OK);
    CHECK(addnet_weights_count(loaded) == 1);
    addnet_weights_destroy(loaded);

    addnet_histogram* h = nullptr;
    REQUIRE(addnet_histogram_build(w, 31, &h) == ADDNET_OK);
    size_t bins = 0;
    std::vector<uint64_t> counts(31);
    REQUIRE(addnet_histogram_counts(h, counts.data(), counts.size(), &bins) == ADDNET_OK);
    CHECK(bins == 31);

    addnet_enumerate_options opt;
    addnet_enumerate_defaults(&opt);
    opt.threads = 1;
    addnet_catalog* cat = nullptr;
    REQUIRE(addnet_enumerate(ADDNET_ARCH_2ADD, &opt, &cat) == ADDNET_OK);

    addnet_match_result* m = nullptr;
    REQUIRE(addnet_match(cat, h, &m) == ADDNET_OK);
    CHECK(addnet_match_ranked_count(m) > 0);
    size_t entry = 0;
    double score = 0.0;
    REQUIRE(addnet_match_ranked(m, 0, &entry, &score) == ADDNET_OK);
    CHECK(score >= 0.0);

    // the chosen set contains zero
    const size_t chosen = addnet_match_chosen(m);
    size_t n = 0;
    REQUIRE(addnet_catalog_coefficients(cat, chosen, nullptr, 0, &n) == ADDNET_OK);
    std::vector<int32_t> coeffs(n);
    REQUIRE(addnet_catalog_coefficients(cat, chosen, coeffs.data(), n, &n) == ADDNET_OK);
    bool has_zero = false;
    for (int32_t c : coeffs) has_zero |= c == 0;
    CHECK(has_zero);

    const fs::path report = tmp.path / "match.txt";
    const fs::path csv = tmp.path / "match.csv";
    REQUIRE(addnet_match_save(cat, m, report.string().c_str(), csv.string().c_str()) ==
            ADDNET_OK);
    CHECK(fs::exists(report));
    CHECK(fs::exists(csv));

    double kl = 0.0;
    REQUIRE(addnet_kl_score(h, coeffs.data(), coeffs.size(), 1e-6, &kl) == ADDNET_OK);
    CHECK(kl >= 0.0);

    addnet_match_result_destroy(m);
    addnet_catalog_destroy(cat);
    addnet_histogram_destroy(h);
    addnet_weights_destroy(w);
}

TEST_CASE("quantize, encode, decode") {
    TempDir tmp;
    addnet_config* cfg = nullptr;
    REQUIRE(addnet_config_optimized(ADDNET_ARCH_2ADD, &cfg) == ADDNET_OK);

    double value = 0.0;
    uint32_t sel = 0;
    REQUIRE(addnet_quantize_value(cfg, 1.0 / 92, 1.0, 0.305, &value, &sel) == ADDNET_OK);
    CHECK(value == doctest::Approx(28.0 / 92).epsilon(1e-12));

    double g = 0.0;
    REQUIRE(addnet_activation_quantize(0.4, 8, 7, &g) == ADDNET_OK);
    CHECK(g == 51.0 / 128);
    CHECK(addnet_activation_quantize(-1.0, 8, 7, &g) == ADDNET_ERR_INVALID_ARGUMENT);

    addnet_weights* w = nullptr;
    REQUIRE(addnet_weights_create(&w) == ADDNET_OK);
    std::vector<float> values;
    for (int i = 0; i < 64; ++i) values.push_back(0.01f * static_cast<float>(i - 32));
    const uint32_t shape[2] = {8, 8};
    REQUIRE(addnet_weights_add(w, "fc", shape, 2, values.data()) == ADDNET_OK);

    addnet_encoded* enc = nullptr;
    REQUIRE(addnet_quantize_weights(w, cfg, &enc) == ADDNET_OK);
    CHECK(addnet_encoded_count(enc) == 1);
    const fs::path path = tmp.path / "enc.bin";
    REQUIRE(addnet_encoded_save(enc, path.string().c_str()) == ADDNET_OK);
    addnet_encoded* loaded = nullptr;
    REQUIRE(addnet_encoded_load(path.string().c_str(), &loaded) == ADDNET_OK);
    addnet_weights* decoded = nullptr;
    REQUIRE(addnet_encoded_decode(loaded, &decoded) == ADDNET_OK);
    CHECK(addnet_weights_count(decoded) == 1);
    addnet_weights_destroy(decoded);
    addnet_encoded_destroy(loaded);
    addnet_encoded_destroy(enc);
    addnet_weights_destroy(w);
    addnet_config_destroy(cfg);
}

TEST_CASE("training through the C surface") {
    TempDir tmp;
    addnet_train_options opt;
    addnet_train_defaults(&opt);
    opt.classes = 2;
    opt.dim = 6;
    opt.train_samples = 400;
    opt.test_samples = 400;
    opt.hidden = 8;
    opt.epochs = 6;
    opt.seed = 5;

    addnet_train_result* base = nullptr;
    REQUIRE(addnet_train_run(&opt, &base) == ADDNET_OK);
    CHECK(addnet_train_epochs(base) == 6);
    const double float_acc = addnet_train_final_accuracy(base);
    CHECK(float_acc > 0.8);
    double loss = 0, ta = 0, va = 0;
    REQUIRE(addnet_train_metric(base, 5, &loss, &ta, &va) == ADDNET_OK);
    CHECK(va == float_acc);
    addnet_train_result_destroy(base);

    opt.quantize_arch = ADDNET_ARCH_3ADD;
    addnet_train_result* quant = nullptr;
    REQUIRE(addnet_train_run(&opt, &quant) == ADDNET_OK);
    const fs::path dir = tmp.path / "model";
    REQUIRE(addnet_train_save(quant, dir.string().c_str()) == ADDNET_OK);
    CHECK(fs::exists(dir / "weights.bin"));
    CHECK(fs::exists(dir / "metrics.txt"));
    CHECK(fs::exists(dir / "encoded.bin"));
    addnet_train_result_destroy(quant);
}

TEST_CASE("cost model through the C surface") {
    TempDir tmp;
    double luts = 0.0;
    int extrapolated = 0;
    REQUIRE(addnet_lut_cost(ADDNET_MULT_2ADD, 9, &luts, &extrapolated) == ADDNET_OK);
    double generic = 0.0;
    REQUIRE(addnet_lut_cost(ADDNET_MULT_GENERIC, 9, &generic, nullptr) == ADDNET_OK);
    CHECK(1.0 - luts / generic == doctest::Approx(0.552).epsilon(1e-9));
    CHECK(extrapolated == 0);

    CHECK(addnet_index_bits(ADDNET_MULT_2ADD) == 4);
    CHECK(addnet_index_bits(ADDNET_MULT_4ADD) == 8);

    double brams = 0.0;
    REQUIRE(addnet_bram_estimate(2304, 4, 1, &brams) == ADDNET_OK);
    CHECK(brams == 0.5);
    CHECK(addnet_layer_memory_mb(884736, 4) == doctest::Approx(0.442368));

    const addnet_layer_spec layers[1] = {{"conv3", 884736, 384, 1}};
    const fs::path rep = tmp.path / "cost.txt";
    const fs::path csv = tmp.path / "cost.csv";
    REQUIRE(addnet_cost_report(layers, 1, ADDNET_MULT_2ADD, 9, rep.string().c_str(),
                               csv.string().c_str()) == ADDNET_OK);
    CHECK(fs::exists(rep));
    CHECK(fs::exists(csv));
}

TEST_CASE("netlist export and simulation") {
    TempDir tmp;
    addnet_config* cfg = nullptr;
    REQUIRE(addnet_config_optimized(ADDNET_ARCH_3ADD, &cfg) == ADDNET_OK);
    const fs::path path = tmp.path / "net.txt";
    REQUIRE(addnet_netlist_export(cfg, path.string().c_str()) == ADDNET_OK);

    addnet_netlist* nl = nullptr;
    REQUIRE(addnet_netlist_load(path.string().c_str(), &nl) == ADDNET_OK);
    for (uint32_t s = 0; s < 64; s += 5) {
        int64_t want = 0, got = 0;
        REQUIRE(addnet_config_eval(cfg, s, 13, &want) == ADDNET_OK);
        REQUIRE(addnet_netlist_simulate(nl, s, 13, &got) == ADDNET_OK);
        CHECK(got == want);
    }
    int64_t out = 0;
    CHECK(addnet_netlist_simulate(nl, 64, 1, &out) == ADDNET_ERR_OUT_OF_RANGE);
    addnet_netlist_destroy(nl);
    addnet_config_destroy(cfg);
}
