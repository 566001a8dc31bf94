#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "core/enumerate.hpp"
#include "core/error.hpp"
#include "core/formats.hpp"
#include "core/netlist.hpp"
#include "core/nn.hpp"
#include "core/quantize.hpp"

using namespace addnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("addnet-io-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("set ids are stable 16-hex content hashes") {
    const std::vector<int32_t> a = {-2, 0, 2};
    const std::vector<int32_t> b = {-2, 0, 3};
    CHECK(io::set_id(a).size() == 16);
    CHECK(io::set_id(a) == io::set_id(a));
    CHECK(io::set_id(a) != io::set_id(b));
    for (char c : io::set_id(a)) CHECK(std::isxdigit(static_cast<unsigned char>(c)));
}

TEST_CASE("config text round trip") {
    for (auto arch : {rccm::Arch::TwoAdd, rccm::Arch::ThreeAdd, rccm::Arch::FourAdd}) {
        const auto cfg = rccm::optimized_config(arch);
        const auto text = io::format_config(cfg);
        CHECK(io::parse_config(arch, text) == cfg);
    }
    CHECK_THROWS_AS((void)io::parse_config(rccm::Arch::ThreeAdd, "A m0 0 1 3 2 B 0 3 2"),
                    Error);
}

TEST_CASE("catalog round trip is byte identical") {
    TempDir tmp;
    enumeration::EnumerateOptions opt;
    opt.phi_max = 2;
    opt.threads = 1;
    const auto catalog = enumeration::enumerate_sets(rccm::Arch::TwoAdd, opt);
    const fs::path p1 = tmp.path / "cat.txt";
    io::save_catalog(catalog, p1);

    const auto loaded = io::load_catalog(p1);
    CHECK(loaded.arch == catalog.arch);
    CHECK(loaded.phi_max == catalog.phi_max);
    CHECK(loaded.generator == catalog.generator);
    REQUIRE(loaded.entries.size() == catalog.entries.size());
    for (size_t i = 0; i < loaded.entries.size(); ++i) {
        CHECK(loaded.entries[i].coefficients == catalog.entries[i].coefficients);
        CHECK(loaded.entries[i].witness == catalog.entries[i].witness);
    }

    const fs::path p2 = tmp.path / "cat2.txt";
    io::save_catalog(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("catalog parser rejects tampered files") {
    TempDir tmp;
    enumeration::Catalog cat;
    cat.arch = rccm::Arch::TwoAdd;
    cat.phi_max = 3;
    cat.generator = enumeration::kGeneratorTag;
    cat.entries.push_back(rccm::make_coefficient_set(rccm::optimized_config(rccm::Arch::TwoAdd)));
    const fs::path p = tmp.path / "cat.txt";
    io::save_catalog(cat, p);

    auto text = slurp(p);
    SUBCASE("footer count") {
        text.replace(text.find("end 1"), 5, "end 2");
    }
    SUBCASE("record id") {
        text.replace(text.find("set ") + 4, 4, "dead");
    }
    const fs::path bad = tmp.path / "bad.txt";
    std::ofstream(bad, std::ios::binary) << text;
    CHECK_THROWS_AS((void)io::load_catalog(bad), Error);
}

TEST_CASE("weights round trip") {
    TempDir tmp;
    nn::Rng rng(8);
    std::vector<io::WeightsRecord> records(2);
    records[0].name = "fc1";
    records[0].shape = {4, 3};
    for (int i = 0; i < 12; ++i)
        records[0].values.push_back(static_cast<float>(rng.normal()));
    records[1].name = "fc2";
    records[1].shape = {2, 4};
    for (int i = 0; i < 8; ++i)
        records[1].values.push_back(static_cast<float>(rng.normal()));

    const fs::path p = tmp.path / "w.bin";
    io::save_weights(records, p);
    const auto loaded = io::load_weights(p);
    REQUIRE(loaded.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(loaded[i].name == records[i].name);
        CHECK(loaded[i].shape == records[i].shape);
        CHECK(loaded[i].values == records[i].values);
    }

    const fs::path p2 = tmp.path / "w2.bin";
    io::save_weights(loaded, p2);
    CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("weights parser rejects truncation") {
    TempDir tmp;
    std::vector<io::WeightsRecord> records(1);
    records[0].name = "w";
    records[0].shape = {8};
    records[0].values.assign(8, 1.0f);
    const fs::path p = tmp.path / "w.bin";
    io::save_weights(records, p);
    auto text = slurp(p);
    const fs::path bad = tmp.path / "bad.bin";
    std::ofstream(bad, std::ios::binary) << text.substr(0, text.size() - 10);
    CHECK_THROWS_AS((void)io::load_weights(bad), Error);
}

TEST_CASE("encoded model round trip") {
    TempDir tmp;
    const auto set = rccm::make_coefficient_set(rccm::optimized_config(rccm::Arch::ThreeAdd));
    const auto scheme = quant::make_scheme_for_range(set, 0.75);
    nn::Rng rng(12);
    std::vector<double> w(37);
    for (auto& v : w) v = rng.uniform(-0.8, 0.8);
    const std::vector<uint32_t> shape = {37};
    std::vector<quant::EncodedLayer> layers = {quant::encode_layer("fc", shape, w, scheme)};

    const fs::path p = tmp.path / "enc.bin";
    io::save_encoded(layers, p);
    const auto loaded = io::load_encoded(p);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].name == "fc");
    CHECK(loaded[0].shape == shape);
    CHECK(loaded[0].lambda == layers[0].lambda);
    CHECK(loaded[0].config == layers[0].config);
    CHECK(loaded[0].bits == layers[0].bits);
    CHECK(quant::decode_layer(loaded[0]) == quant::decode_layer(layers[0]));

    const fs::path p2 = tmp.path / "enc2.bin";
    io::save_encoded(loaded, p2);
    CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("netlist file round trip and simulation") {
    TempDir tmp;
    for (auto arch : {rccm::Arch::TwoAdd, rccm::Arch::ThreeAdd, rccm::Arch::FourAdd}) {
        const auto cfg = rccm::optimized_config(arch);
        const auto nl = netlist::build(cfg);
        const fs::path p = tmp.path / "net.txt";
        io::save_netlist(nl, p);
        const auto loaded = io::load_netlist(p);
        for (uint32_t s = 0; s < rccm::select_count(arch); ++s)
            for (int64_t x : {-64, -3, 0, 1, 17, 64})
                CHECK(netlist::simulate(loaded, s, x) == rccm::eval(cfg, s, x));

        const fs::path p2 = tmp.path / "net2.txt";
        io::save_netlist(loaded, p2);
        CHECK(slurp(p) == slurp(p2));
    }
}

TEST_CASE("netlist parser rejects dangling references") {
    TempDir tmp;
    const auto nl = netlist::build(rccm::optimized_config(rccm::Arch::TwoAdd));
    const fs::path p = tmp.path / "net.txt";
    io::save_netlist(nl, p);
    auto text = slurp(p);
    // forward-reference an undefined node in the first shl line
    const auto pos = text.find("shl 0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 5, "shl 99");
    const fs::path bad = tmp.path / "bad.txt";
    std::ofstream(bad, std::ios::binary) << text;
    CHECK_THROWS_AS((void)io::load_netlist(bad), Error);
}

TEST_CASE("match report and csv") {
    TempDir tmp;
    enumeration::EnumerateOptions opt;
    opt.phi_max = 2;
    opt.threads = 1;
    const auto catalog = enumeration::enumerate_sets(rccm::Arch::TwoAdd, opt);
    nn::Rng rng(21);
    std::vector<double> w(4000);
    for (auto& v : w) v = 0.05 * rng.normal();
    const auto hist = matching::histogram(w, 31);
    const auto res = matching::distribution_match(catalog, hist);

    const fs::path rep = tmp.path / "match.txt";
    const fs::path csv = tmp.path / "match.csv";
    io::save_match_report(catalog, res, rep, 10);
    io::save_match_csv(catalog, res, csv);

    const auto text = slurp(rep);
    CHECK(text.find("addnet-match v1") == 0);
    CHECK(text.find("chosen ") != std::string::npos);
    CHECK(text.find("rank 0 ") != std::string::npos);
    const auto ctext = slurp(csv);
    CHECK(ctext.find("rank,id,size,dkl") == 0);
}

TEST_CASE("cost report and sweep csv") {
    TempDir tmp;
    const cost::LayerSpec layer{"conv3", 884736, 384, 1};
    const auto rep = cost::network_report(std::span(&layer, 1), cost::MultKind::TwoAdd, 9);
    const fs::path p = tmp.path / "cost.txt";
    io::save_cost_report(rep, p);
    const auto text = slurp(p);
    CHECK(text.find("addnet-cost v1") == 0);
    CHECK(text.find("layer conv3 ") != std::string::npos);
    CHECK(text.find("total total ") != std::string::npos);

    const fs::path csv = tmp.path / "cost.csv";
    io::save_cost_csv(cost::CostParams::defaults(), csv);
    const auto ctext = slurp(csv);
    CHECK(ctext.find("w_in,generic,2add,3add,4add") == 0);
    // 14 sweep rows plus header
    CHECK(std::count(ctext.begin(), ctext.end(), '\n') == 15);
}

TEST_CASE("atomic write leaves no temp file behind") {
    TempDir tmp;
    const fs::path p = tmp.path / "out.txt";
    io::atomic_write(p, [](std::ostream& out) { out << "hello\n"; });
    CHECK(slurp(p) == "hello\n");
    size_t files = 0;
    for (auto& e : fs::directory_iterator(tmp.path)) {
        (void)e;
        ++files;
    }
    CHECK(files == 1);
}
