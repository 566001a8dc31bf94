#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace addnet::rccm {

// Reconfigurable constant-coefficient multipliers built from two mux-adder
// cell types. Both cells take two operands (a, b) and a 2-bit select.
//
// Type A computes, per select:
//   00: (a<<s1) + (b<<s4)
//   01: (a<<s2) + (b<<s4)
//   10: (a<<s3) + (b<<s4)
//   11: one of  (b<<s4), -(a<<s1)+(b<<s4), -(a<<s2)+(b<<s4), -(a<<s3)+(b<<s4)
// chosen by the cell's mux mapping.
//
// Type B is fixed:
//   00: -(a<<s1) + (b<<s3)
//   01: -(a<<s2) + (b<<s3)
//   10:  (a<<s1) - (b<<s3)
//   11:  (a<<s2) - (b<<s3)

// Fourth-output variant of a type-A cell.
enum class MuxMapping : uint8_t {
    PassB = 0,  // b<<s4
    SubTap1,    // -(a<<s1) + (b<<s4)
    SubTap2,    // -(a<<s2) + (b<<s4)
    SubTap3,    // -(a<<s3) + (b<<s4)
};

struct CellConfigA {
    MuxMapping mapping = MuxMapping::PassB;
    // shifts[0..2] apply to operand a (the three added taps),
    // shifts[3] applies to operand b.
    std::array<uint8_t, 4> shifts{};

    bool operator==(const CellConfigA&) const = default;
};

struct CellConfigB {
    // shifts[0..1] apply to operand a, shifts[2] to operand b.
    std::array<uint8_t, 3> shifts{};

    bool operator==(const CellConfigB&) const = default;
};

enum class Arch : uint8_t { TwoAdd = 0, ThreeAdd = 1, FourAdd = 2 };

// Width of the full select signal in bits (2 per cell).
int select_width(Arch arch);
// Number of adder stages (type-A cells plus the type-B output cell).
int adder_count(Arch arch);
// Number of type-A cells.
int cell_a_count(Arch arch);
// 2^select_width.
uint32_t select_count(Arch arch);

const char* arch_name(Arch arch);                 // "2add" / "3add" / "4add"
std::optional<Arch> arch_from_name(const std::string& name);

// Full parameterization of one multiplier. The cell wiring is fixed per
// architecture:
//   TwoAdd:   t  = A1(x, x);                     y = B(t,  x)
//   ThreeAdd: t1 = A1(x, x); t2 = A2(x, x);      y = B(t1, t2)
//   FourAdd:  t1 = A1(x, x); t2 = A2(x, x);
//             t3 = A3(t1, t2);                   y = B(t3, x)
// The select signal packs 2-bit fields little-endian in cell order, type-A
// cells first, the type-B cell in the top bits.
struct RccmConfig {
    Arch arch = Arch::TwoAdd;
    std::vector<CellConfigA> cells_a;
    CellConfigB cell_b;

    bool operator==(const RccmConfig&) const = default;
};

// Throws Error(invalid_argument) if the cell count does not match the
// architecture or any shift exceeds kMaxShift.
inline constexpr int kMaxShift = 16;
void validate(const RccmConfig& config);

int64_t eval_cell_a(const CellConfigA& cfg, int64_t a, int64_t b, unsigned s);
int64_t eval_cell_b(const CellConfigB& cfg, int64_t a, int64_t b, unsigned s);

// y = c_select * x. Throws Error(out_of_range) if select >= 2^select_width.
int64_t eval(const RccmConfig& config, uint32_t select, int64_t x);

// The coefficient reached by one select value; equals eval(config, select, 1).
int64_t coefficient_of(const RccmConfig& config, uint32_t select);

// All distinct coefficients over the full select sweep, sorted ascending.
std::vector<int32_t> coefficient_set(const RccmConfig& config);

// Smallest select producing coefficient c, or nullopt if unreachable.
std::optional<uint32_t> select_for(const RccmConfig& config, int64_t c);

// Canonical coefficient set together with the config that generates it.
struct CoefficientSet {
    std::vector<int32_t> coefficients;  // strictly increasing
    Arch arch = Arch::TwoAdd;
    RccmConfig witness;
};

CoefficientSet make_coefficient_set(const RccmConfig& config);

// The shipped per-architecture reference configurations (the distribution-
// matched circuits this library was built around).
RccmConfig optimized_config(Arch arch);

} // namespace addnet::rccm
