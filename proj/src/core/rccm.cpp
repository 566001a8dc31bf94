#include "core/rccm.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace addnet::rccm {

int select_width(Arch arch) {
    switch (arch) {
        case Arch::TwoAdd: return 4;
        case Arch::ThreeAdd: return 6;
        case Arch::FourAdd: return 8;
    }
    fail(ErrorCode::invalid_argument, "bad arch");
}

int adder_count(Arch arch) { return select_width(arch) / 2; }

int cell_a_count(Arch arch) { return adder_count(arch) - 1; }

uint32_t select_count(Arch arch) { return 1u << select_width(arch); }

const char* arch_name(Arch arch) {
    switch (arch) {
        case Arch::TwoAdd: return "2add";
        case Arch::ThreeAdd: return "3add";
        case Arch::FourAdd: return "4add";
    }
    return "?";
}

std::optional<Arch> arch_from_name(const std::string& name) {
    if (name == "2add") return Arch::TwoAdd;
    if (name == "3add") return Arch::ThreeAdd;
    if (name == "4add") return Arch::FourAdd;
    return std::nullopt;
}

void validate(const RccmConfig& config) {
    select_width(config.arch);
    if (static_cast<int>(config.cells_a.size()) != cell_a_count(config.arch))
        fail(ErrorCode::invalid_argument, "cell count does not match architecture");
    auto check_shift = [](unsigned s) {
        if (s > kMaxShift)
            fail(ErrorCode::invalid_argument, "shift exceeds maximum");
    };
    for (const auto& cell : config.cells_a) {
        if (cell.mapping > MuxMapping::SubTap3)
            fail(ErrorCode::invalid_argument, "bad mux mapping");
        for (auto s : cell.shifts) check_shift(s);
    }
    for (auto s : config.cell_b.shifts) check_shift(s);
}

int64_t eval_cell_a(const CellConfigA& cfg, int64_t a, int64_t b, unsigned s) {
    const int64_t b1 = b << cfg.shifts[3];
    switch (s & 3u) {
        case 0: return (a << cfg.shifts[0]) + b1;
        case 1: return (a << cfg.shifts[1]) + b1;
        case 2: return (a << cfg.shifts[2]) + b1;
        default: break;
    }
    switch (cfg.mapping) {
        case MuxMapping::PassB: return b1;
        case MuxMapping::SubTap1: return b1 - (a << cfg.shifts[0]);
        case MuxMapping::SubTap2: return b1 - (a << cfg.shifts[1]);
        case MuxMapping::SubTap3: return b1 - (a << cfg.shifts[2]);
    }
    fail(ErrorCode::internal, "bad mux mapping");
}

int64_t eval_cell_b(const CellConfigB& cfg, int64_t a, int64_t b, unsigned s) {
    const int64_t b1 = b << cfg.shifts[2];
    switch (s & 3u) {
        case 0: return b1 - (a << cfg.shifts[0]);
        case 1: return b1 - (a << cfg.shifts[1]);
        case 2: return (a << cfg.shifts[0]) - b1;
        default: return (a << cfg.shifts[1]) - b1;
    }
}

int64_t eval(const RccmConfig& config, uint32_t select, int64_t x) {
    if (select >= select_count(config.arch))
        fail(ErrorCode::out_of_range, "select out of range for architecture");
    const auto field = [select](int cell) { return (select >> (2 * cell)) & 3u; };
    switch (config.arch) {
        case Arch::TwoAdd: {
            const int64_t t = eval_cell_a(config.cells_a[0], x, x, field(0));
            return eval_cell_b(config.cell_b, t, x, field(1));
        }
        case Arch::ThreeAdd: {
            const int64_t t1 = eval_cell_a(config.cells_a[0], x, x, field(0));
            const int64_t t2 = eval_cell_a(config.cells_a[1], x, x, field(1));
            return eval_cell_b(config.cell_b, t1, t2, field(2));
        }
        case Arch::FourAdd: {
            const int64_t t1 = eval_cell_a(config.cells_a[0], x, x, field(0));
            const int64_t t2 = eval_cell_a(config.cells_a[1], x, x, field(1));
            const int64_t t3 = eval_cell_a(config.cells_a[2], t1, t2, field(2));
            return eval_cell_b(config.cell_b, t3, x, field(3));
        }
    }
    fail(ErrorCode::internal, "bad arch");
}

int64_t coefficient_of(const RccmConfig& config, uint32_t select) {
    return eval(config, select, 1);
}

std::vector<int32_t> coefficient_set(const RccmConfig& config) {
    const uint32_t n = select_count(config.arch);
    std::vector<int32_t> out;
    out.reserve(n);
    for (uint32_t s = 0; s < n; ++s)
        out.push_back(static_cast<int32_t>(coefficient_of(config, s)));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<uint32_t> select_for(const RccmConfig& config, int64_t c) {
    const uint32_t n = select_count(config.arch);
    for (uint32_t s = 0; s < n; ++s)
        if (coefficient_of(config, s) == c) return s;
    return std::nullopt;
}

CoefficientSet make_coefficient_set(const RccmConfig& config) {
    validate(config);
    return CoefficientSet{coefficient_set(config), config.arch, config};
}

RccmConfig optimized_config(Arch arch) {
    RccmConfig cfg;
    cfg.arch = arch;
    switch (arch) {
        case Arch::TwoAdd:
            cfg.cells_a = {{MuxMapping::PassB, {0, 1, 3, 2}}};
            cfg.cell_b = {{0, 3, 2}};
            break;
        case Arch::ThreeAdd:
            cfg.cells_a = {{MuxMapping::SubTap2, {0, 2, 3, 3}},
                           {MuxMapping::SubTap1, {0, 1, 3, 0}}};
            cfg.cell_b = {{0, 3, 0}};
            break;
        case Arch::FourAdd:
            cfg.cells_a = {{MuxMapping::SubTap3, {0, 1, 3, 0}},
                           {MuxMapping::SubTap2, {0, 1, 3, 1}},
                           {MuxMapping::SubTap1, {0, 1, 3, 3}}};
            cfg.cell_b = {{0, 3, 1}};
            break;
    }
    return cfg;
}

} // namespace addnet::rccm
