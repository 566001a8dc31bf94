#include "core/formats.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "core/error.hpp"

namespace addnet::io {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail(ErrorCode::parse, "bad number: " + s);
    return v;
}

int64_t parse_int(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') fail(ErrorCode::parse, "bad integer: " + s);
    return v;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::parse, std::string("truncated file, expected ") + what);
    return line;
}

void expect_header(std::istream& in, const std::string& magic) {
    if (expect_line(in, magic.c_str()) != magic)
        fail(ErrorCode::parse, "not a " + magic + " file");
}

rccm::Arch parse_arch(const std::string& name) {
    const auto a = rccm::arch_from_name(name);
    if (!a) fail(ErrorCode::parse, "unknown architecture: " + name);
    return *a;
}

void read_payload(std::istream& in, void* dst, size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
        fail(ErrorCode::parse, "truncated binary payload");
    if (in.get() != '\n') fail(ErrorCode::parse, "missing newline after payload");
}

} // namespace

std::string set_id(std::span<const int32_t> coefficients) {
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[16];
    bool first = true;
    for (int32_t c : coefficients) {
        const int n = std::snprintf(buf, sizeof buf, first ? "%d" : ",%d", c);
        first = false;
        for (int i = 0; i < n; ++i) {
            h ^= static_cast<uint8_t>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016" PRIx64, h);
    return out;
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorCode::io, "cannot open " + tmp.string() + " for writing");
        writer(out);
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            fail(ErrorCode::io, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::io, "cannot rename into " + path.string());
    }
}

// ---- configs ---------------------------------------------------------------

std::string format_config(const rccm::RccmConfig& config) {
    std::ostringstream ss;
    for (const auto& cell : config.cells_a) {
        ss << "A m" << static_cast<int>(cell.mapping);
        for (auto s : cell.shifts) ss << ' ' << static_cast<int>(s);
        ss << ' ';
    }
    ss << "B";
    for (auto s : config.cell_b.shifts) ss << ' ' << static_cast<int>(s);
    return ss.str();
}

rccm::RccmConfig parse_config(rccm::Arch arch, const std::string& text) {
    const auto toks = tokenize(text);
    rccm::RccmConfig cfg;
    cfg.arch = arch;
    size_t i = 0;
    auto next = [&]() -> const std::string& {
        if (i >= toks.size()) fail(ErrorCode::parse, "truncated config: " + text);
        return toks[i++];
    };
    for (int c = 0; c < rccm::cell_a_count(arch); ++c) {
        if (next() != "A") fail(ErrorCode::parse, "expected type-A cell in: " + text);
        const std::string& m = next();
        if (m.size() != 2 || m[0] != 'm' || m[1] < '0' || m[1] > '3')
            fail(ErrorCode::parse, "bad mux mapping: " + m);
        rccm::CellConfigA cell;
        cell.mapping = static_cast<rccm::MuxMapping>(m[1] - '0');
        for (auto& s : cell.shifts) s = static_cast<uint8_t>(parse_int(next()));
        cfg.cells_a.push_back(cell);
    }
    if (next() != "B") fail(ErrorCode::parse, "expected type-B cell in: " + text);
    for (auto& s : cfg.cell_b.shifts) s = static_cast<uint8_t>(parse_int(next()));
    if (i != toks.size()) fail(ErrorCode::parse, "trailing tokens in config: " + text);
    rccm::validate(cfg);
    return cfg;
}

// ---- catalogs ---------------------------------------------------------------

namespace {

void write_catalog_entry(std::ostream& out, const rccm::CoefficientSet& set) {
    out << "set " << set_id(set.coefficients) << " coeffs";
    for (int32_t c : set.coefficients) out << ' ' << c;
    out << " witness " << format_config(set.witness) << '\n';
}

} // namespace

struct CatalogWriter::Impl {
    std::filesystem::path path;
    std::filesystem::path tmp;
    std::ofstream out;
    uint64_t count = 0;
    bool finished = false;
};

CatalogWriter::CatalogWriter(const std::filesystem::path& path, rccm::Arch arch, int phi_max,
                             const std::string& generator, const std::string& order)
    : impl_(new Impl) {
    impl_->path = path;
    impl_->tmp = path;
    impl_->tmp += ".tmp." + std::to_string(::getpid());
    impl_->out.open(impl_->tmp, std::ios::binary);
    if (!impl_->out) fail(ErrorCode::io, "cannot open " + impl_->tmp.string() + " for writing");
    impl_->out << "addnet-catalog v1\n"
               << "arch " << rccm::arch_name(arch) << '\n'
               << "phi-max " << phi_max << '\n'
               << "generator " << generator << '\n'
               << "order " << order << '\n';
}

void CatalogWriter::add(const rccm::CoefficientSet& set) {
    write_catalog_entry(impl_->out, set);
    ++impl_->count;
}

void CatalogWriter::finish() {
    impl_->out << "end " << impl_->count << '\n';
    impl_->out.flush();
    if (!impl_->out) fail(ErrorCode::io, "write failed for " + impl_->tmp.string());
    impl_->out.close();
    std::error_code ec;
    std::filesystem::rename(impl_->tmp, impl_->path, ec);
    if (ec) fail(ErrorCode::io, "cannot rename into " + impl_->path.string());
    impl_->finished = true;
}

CatalogWriter::~CatalogWriter() {
    if (impl_ && !impl_->finished) {
        impl_->out.close();
        std::error_code ec;
        std::filesystem::remove(impl_->tmp, ec);
    }
}

void save_catalog(const enumeration::Catalog& catalog, const std::filesystem::path& path) {
    CatalogWriter writer(path, catalog.arch, catalog.phi_max, catalog.generator, "sorted");
    for (const auto& set : catalog.entries) writer.add(set);
    writer.finish();
}

enumeration::Catalog load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    expect_header(in, "addnet-catalog v1");
    enumeration::Catalog cat;

    auto kv = [&](const char* key) {
        const auto toks = tokenize(expect_line(in, key));
        if (toks.size() != 2 || toks[0] != key)
            fail(ErrorCode::parse, std::string("expected '") + key + "' line");
        return toks[1];
    };
    cat.arch = parse_arch(kv("arch"));
    cat.phi_max = static_cast<int>(parse_int(kv("phi-max")));
    cat.generator = kv("generator");
    kv("order");

    std::string line;
    while (true) {
        line = expect_line(in, "set record or end");
        auto toks = tokenize(line);
        if (toks.empty()) fail(ErrorCode::parse, "blank line in catalog");
        if (toks[0] == "end") {
            if (toks.size() != 2 ||
                parse_int(toks[1]) != static_cast<int64_t>(cat.entries.size()))
                fail(ErrorCode::parse, "catalog footer count mismatch");
            break;
        }
        if (toks.size() < 4 || toks[0] != "set" || toks[2] != "coeffs")
            fail(ErrorCode::parse, "bad catalog record: " + line);
        rccm::CoefficientSet set;
        set.arch = cat.arch;
        size_t i = 3;
        while (i < toks.size() && toks[i] != "witness")
            set.coefficients.push_back(static_cast<int32_t>(parse_int(toks[i++])));
        if (i == toks.size()) fail(ErrorCode::parse, "catalog record without witness");
        std::string cfg_text;
        for (++i; i < toks.size(); ++i) {
            if (!cfg_text.empty()) cfg_text += ' ';
            cfg_text += toks[i];
        }
        set.witness = parse_config(cat.arch, cfg_text);
        if (set_id(set.coefficients) != toks[1])
            fail(ErrorCode::parse, "catalog record id mismatch");
        cat.entries.push_back(std::move(set));
    }
    return cat;
}

// ---- weights ----------------------------------------------------------------

void save_weights(std::span<const WeightsRecord> records, const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        out << "addnet-weights v1\n" << "layers " << records.size() << '\n';
        for (const auto& rec : records) {
            if (rec.name.find_first_of(" \t\n") != std::string::npos)
                fail(ErrorCode::invalid_argument, "layer name contains whitespace");
            uint64_t n = 1;
            out << "layer " << rec.name << '\n' << "shape";
            for (uint32_t d : rec.shape) {
                out << ' ' << d;
                n *= d;
            }
            out << '\n';
            if (n != rec.values.size())
                fail(ErrorCode::invalid_argument, "shape does not match value count");
            out << "data " << 4 * rec.values.size() << '\n';
            out.write(reinterpret_cast<const char*>(rec.values.data()),
                      static_cast<std::streamsize>(4 * rec.values.size()));
            out << '\n';
        }
        out << "end\n";
    });
}

std::vector<WeightsRecord> load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    expect_header(in, "addnet-weights v1");
    const auto head = tokenize(expect_line(in, "layers"));
    if (head.size() != 2 || head[0] != "layers")
        fail(ErrorCode::parse, "expected 'layers' line");
    const int64_t count = parse_int(head[1]);

    std::vector<WeightsRecord> records;
    for (int64_t k = 0; k < count; ++k) {
        WeightsRecord rec;
        auto toks = tokenize(expect_line(in, "layer"));
        if (toks.size() != 2 || toks[0] != "layer")
            fail(ErrorCode::parse, "expected 'layer' line");
        rec.name = toks[1];
        toks = tokenize(expect_line(in, "shape"));
        if (toks.empty() || toks[0] != "shape")
            fail(ErrorCode::parse, "expected 'shape' line");
        uint64_t n = 1;
        for (size_t i = 1; i < toks.size(); ++i) {
            rec.shape.push_back(static_cast<uint32_t>(parse_int(toks[i])));
            n *= rec.shape.back();
        }
        toks = tokenize(expect_line(in, "data"));
        if (toks.size() != 2 || toks[0] != "data")
            fail(ErrorCode::parse, "expected 'data' line");
        const uint64_t bytes = static_cast<uint64_t>(parse_int(toks[1]));
        if (bytes != 4 * n) fail(ErrorCode::parse, "payload length does not match shape");
        rec.values.resize(n);
        read_payload(in, rec.values.data(), bytes);
        records.push_back(std::move(rec));
    }
    if (expect_line(in, "end") != "end") fail(ErrorCode::parse, "missing end marker");
    return records;
}

// ---- encoded models -----------------------------------------------------------

void save_encoded(std::span<const quant::EncodedLayer> layers,
                  const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        out << "addnet-encoded v1\n" << "layers " << layers.size() << '\n';
        for (const auto& layer : layers) {
            if (layer.name.find_first_of(" \t\n") != std::string::npos)
                fail(ErrorCode::invalid_argument, "layer name contains whitespace");
            out << "layer " << layer.name << '\n' << "shape";
            for (uint32_t d : layer.shape) out << ' ' << d;
            out << '\n'
                << "arch " << rccm::arch_name(layer.config.arch) << '\n'
                << "lambda " << fmt_double(layer.lambda) << '\n'
                << "set " << set_id(rccm::coefficient_set(layer.config)) << '\n'
                << "witness " << format_config(layer.config) << '\n'
                << "data " << layer.bits.size() << '\n';
            out.write(reinterpret_cast<const char*>(layer.bits.data()),
                      static_cast<std::streamsize>(layer.bits.size()));
            out << '\n';
        }
        out << "end\n";
    });
}

std::vector<quant::EncodedLayer> load_encoded(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    expect_header(in, "addnet-encoded v1");
    auto head = tokenize(expect_line(in, "layers"));
    if (head.size() != 2 || head[0] != "layers")
        fail(ErrorCode::parse, "expected 'layers' line");
    const int64_t count = parse_int(head[1]);

    std::vector<quant::EncodedLayer> layers;
    for (int64_t k = 0; k < count; ++k) {
        quant::EncodedLayer layer;
        auto toks = tokenize(expect_line(in, "layer"));
        if (toks.size() != 2 || toks[0] != "layer")
            fail(ErrorCode::parse, "expected 'layer' line");
        layer.name = toks[1];
        toks = tokenize(expect_line(in, "shape"));
        if (toks.empty() || toks[0] != "shape")
            fail(ErrorCode::parse, "expected 'shape' line");
        for (size_t i = 1; i < toks.size(); ++i)
            layer.shape.push_back(static_cast<uint32_t>(parse_int(toks[i])));
        toks = tokenize(expect_line(in, "arch"));
        if (toks.size() != 2 || toks[0] != "arch")
            fail(ErrorCode::parse, "expected 'arch' line");
        const rccm::Arch arch = parse_arch(toks[1]);
        toks = tokenize(expect_line(in, "lambda"));
        if (toks.size() != 2 || toks[0] != "lambda")
            fail(ErrorCode::parse, "expected 'lambda' line");
        layer.lambda = parse_double(toks[1]);
        toks = tokenize(expect_line(in, "set"));
        if (toks.size() != 2 || toks[0] != "set")
            fail(ErrorCode::parse, "expected 'set' line");
        const std::string id = toks[1];
        toks = tokenize(expect_line(in, "witness"));
        if (toks.size() < 2 || toks[0] != "witness")
            fail(ErrorCode::parse, "expected 'witness' line");
        std::string cfg_text;
        for (size_t i = 1; i < toks.size(); ++i) {
            if (!cfg_text.empty()) cfg_text += ' ';
            cfg_text += toks[i];
        }
        layer.config = parse_config(arch, cfg_text);
        if (set_id(rccm::coefficient_set(layer.config)) != id)
            fail(ErrorCode::parse, "encoded layer set id mismatch");
        toks = tokenize(expect_line(in, "data"));
        if (toks.size() != 2 || toks[0] != "data")
            fail(ErrorCode::parse, "expected 'data' line");
        const uint64_t bytes = static_cast<uint64_t>(parse_int(toks[1]));
        const uint64_t need =
            (layer.count() * static_cast<uint64_t>(layer.bits_per_weight()) + 7) / 8;
        if (bytes != need) fail(ErrorCode::parse, "index payload length mismatch");
        layer.bits.resize(bytes);
        read_payload(in, layer.bits.data(), bytes);
        layers.push_back(std::move(layer));
    }
    if (expect_line(in, "end") != "end") fail(ErrorCode::parse, "missing end marker");
    return layers;
}

// ---- netlists ------------------------------------------------------------------

void save_netlist(const netlist::Netlist& nl, const std::filesystem::path& path) {
    netlist::validate(nl);
    atomic_write(path, [&](std::ostream& out) {
        out << "addnet-netlist v1\n"
            << "arch " << rccm::arch_name(nl.arch) << " ws " << rccm::select_width(nl.arch)
            << '\n'
            << "nodes " << nl.nodes.size() << '\n';
        for (size_t i = 0; i < nl.nodes.size(); ++i) {
            const auto& n = nl.nodes[i];
            out << "node " << i << ' ';
            switch (n.op) {
                case netlist::Node::Op::Input: out << "input"; break;
                case netlist::Node::Op::Shl: out << "shl " << n.a << ' ' << n.shift; break;
                case netlist::Node::Op::Add: out << "add " << n.a << ' ' << n.b; break;
                case netlist::Node::Op::Sub: out << "sub " << n.a << ' ' << n.b; break;
                case netlist::Node::Op::Mux:
                    out << "mux " << n.field;
                    for (int32_t ref : n.mux_in) out << ' ' << ref;
                    break;
            }
            out << '\n';
        }
        out << "output " << nl.output << '\n' << "end\n";
    });
}

netlist::Netlist load_netlist(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    expect_header(in, "addnet-netlist v1");
    auto toks = tokenize(expect_line(in, "arch"));
    if (toks.size() != 4 || toks[0] != "arch" || toks[2] != "ws")
        fail(ErrorCode::parse, "expected 'arch <name> ws <bits>' line");
    netlist::Netlist nl;
    nl.arch = parse_arch(toks[1]);
    if (parse_int(toks[3]) != rccm::select_width(nl.arch))
        fail(ErrorCode::parse, "select width does not match architecture");
    toks = tokenize(expect_line(in, "nodes"));
    if (toks.size() != 2 || toks[0] != "nodes")
        fail(ErrorCode::parse, "expected 'nodes' line");
    const int64_t count = parse_int(toks[1]);
    for (int64_t i = 0; i < count; ++i) {
        toks = tokenize(expect_line(in, "node"));
        if (toks.size() < 3 || toks[0] != "node" || parse_int(toks[1]) != i)
            fail(ErrorCode::parse, "bad node line (ids must be dense and in order)");
        netlist::Node n;
        const std::string& op = toks[2];
        auto want = [&](size_t k) {
            if (toks.size() != k) fail(ErrorCode::parse, "bad arity for op " + op);
        };
        if (op == "input") {
            want(3);
            n.op = netlist::Node::Op::Input;
        } else if (op == "shl") {
            want(5);
            n.op = netlist::Node::Op::Shl;
            n.a = static_cast<int32_t>(parse_int(toks[3]));
            n.shift = static_cast<int>(parse_int(toks[4]));
        } else if (op == "add" || op == "sub") {
            want(5);
            n.op = op == "add" ? netlist::Node::Op::Add : netlist::Node::Op::Sub;
            n.a = static_cast<int32_t>(parse_int(toks[3]));
            n.b = static_cast<int32_t>(parse_int(toks[4]));
        } else if (op == "mux") {
            want(8);
            n.op = netlist::Node::Op::Mux;
            n.field = static_cast<int>(parse_int(toks[3]));
            for (int j = 0; j < 4; ++j)
                n.mux_in[j] = static_cast<int32_t>(parse_int(toks[4 + j]));
        } else {
            fail(ErrorCode::parse, "unknown netlist op: " + op);
        }
        nl.nodes.push_back(n);
    }
    toks = tokenize(expect_line(in, "output"));
    if (toks.size() != 2 || toks[0] != "output")
        fail(ErrorCode::parse, "expected 'output' line");
    nl.output = static_cast<int32_t>(parse_int(toks[1]));
    if (expect_line(in, "end") != "end") fail(ErrorCode::parse, "missing end marker");
    netlist::validate(nl);
    return nl;
}

// ---- reports -----------------------------------------------------------------

namespace {

std::string fmt_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void save_match_report(const enumeration::Catalog& catalog, const matching::MatchResult& result,
                       const std::filesystem::path& path, size_t ranked_limit) {
    atomic_write(path, [&](std::ostream& out) {
        out << "addnet-match v1\n"
            << "arch " << rccm::arch_name(catalog.arch) << '\n'
            << "candidates " << result.ranked.size() << '\n';
        auto entry_line = [&](const char* tag, size_t rank_idx) {
            const auto& r = result.ranked[rank_idx];
            const auto& coeffs = catalog.entries[r.entry].coefficients;
            out << tag << ' ' << set_id(coeffs) << ' ' << fmt_score(r.score) << ' '
                << coeffs.size() << '\n';
        };
        for (size_t i = 0; i < result.top.size(); ++i) entry_line("top", i);
        for (size_t i = 0; i < result.ranked.size(); ++i)
            if (result.ranked[i].entry == result.chosen) {
                entry_line("chosen", i);
                break;
            }
        out << "reason " << result.tie_break << '\n';
        const size_t n = std::min(ranked_limit, result.ranked.size());
        for (size_t i = 0; i < n; ++i) {
            out << "rank " << i << ' ';
            const auto& r = result.ranked[i];
            const auto& coeffs = catalog.entries[r.entry].coefficients;
            out << set_id(coeffs) << ' ' << fmt_score(r.score) << ' ' << coeffs.size() << '\n';
        }
        out << "end\n";
    });
}

void save_match_csv(const enumeration::Catalog& catalog, const matching::MatchResult& result,
                    const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        out << "rank,id,size,dkl\n";
        for (size_t i = 0; i < result.ranked.size(); ++i) {
            const auto& r = result.ranked[i];
            const auto& coeffs = catalog.entries[r.entry].coefficients;
            out << i << ',' << set_id(coeffs) << ',' << coeffs.size() << ','
                << fmt_score(r.score) << '\n';
        }
    });
}

void save_cost_report(const cost::CostReport& report, const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        out << "addnet-cost v1\n"
            << "kind " << cost::mult_kind_name(report.kind) << '\n'
            << "w-in " << report.w_in << '\n'
            << "columns layer luts brams memory-mb baseline-luts baseline-brams baseline-mb\n";
        auto row = [&](const cost::LayerCost& lc, const char* tag) {
            out << tag << ' ' << lc.name << ' ' << fmt_score(lc.luts) << ' '
                << fmt_score(lc.brams) << ' ' << fmt_score(lc.memory_mb) << ' '
                << fmt_score(lc.baseline_luts) << ' ' << fmt_score(lc.baseline_brams) << ' '
                << fmt_score(lc.baseline_memory_mb) << '\n';
        };
        for (const auto& lc : report.layers) row(lc, "layer");
        row(report.total, "total");
        out << "end\n";
    });
}

void save_cost_csv(const cost::CostParams& params, const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        out << "w_in,generic,2add,3add,4add\n";
        for (int w = cost::kMinWidth; w <= cost::kMaxWidth; ++w) {
            out << w;
            for (auto kind : {cost::MultKind::Generic, cost::MultKind::TwoAdd,
                              cost::MultKind::ThreeAdd, cost::MultKind::FourAdd})
                out << ',' << fmt_score(cost::lut_cost(kind, w, params).luts);
            out << '\n';
        }
    });
}

void save_metrics(std::span<const train::EpochMetrics> history,
                  const std::filesystem::path& path) {
    atomic_write(path, [&](std::ostream& out) {
        for (const auto& em : history)
            out << "epoch " << em.epoch << " loss " << fmt_score(em.loss) << " train-acc "
                << fmt_score(em.train_accuracy) << " test-acc " << fmt_score(em.test_accuracy)
                << '\n';
    });
}

} // namespace addnet::io
