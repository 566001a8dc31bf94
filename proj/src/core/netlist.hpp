#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/rccm.hpp"

namespace addnet::netlist {

// Adder-graph form of one multiplier: the handoff boundary for HDL
// generation. Nodes are definition-before-use; node 0 is the input.
struct Node {
    enum class Op { Input, Shl, Add, Sub, Mux };
    Op op = Op::Input;
    int32_t a = -1;  // Shl/Add/Sub operand, Sub computes value(a) - value(b)
    int32_t b = -1;
    int shift = 0;                      // Shl amount
    int field = 0;                      // Mux: 2-bit select field index
    std::array<int32_t, 4> mux_in{-1, -1, -1, -1};
};

struct Netlist {
    rccm::Arch arch = rccm::Arch::TwoAdd;
    std::vector<Node> nodes;
    int32_t output = -1;
};

Netlist build(const rccm::RccmConfig& config);

// Evaluates the graph; equals eval(config, select, x) of the source config.
// Throws Error(out_of_range) for selects beyond the arch width and
// Error(data) for malformed graphs.
int64_t simulate(const Netlist& netlist, uint32_t select, int64_t x);

// Structural checks shared by build and the file parser: op arity, forward
// references, output presence.
void validate(const Netlist& netlist);

} // namespace addnet::netlist
