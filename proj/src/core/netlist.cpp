#include "core/netlist.hpp"

#include "core/error.hpp"

namespace addnet::netlist {

namespace {

int32_t add_node(Netlist& nl, Node n) {
    nl.nodes.push_back(n);
    return static_cast<int32_t>(nl.nodes.size()) - 1;
}

int32_t shl(Netlist& nl, int32_t src, int k) {
    Node n;
    n.op = Node::Op::Shl;
    n.a = src;
    n.shift = k;
    return add_node(nl, n);
}

int32_t binop(Netlist& nl, Node::Op op, int32_t a, int32_t b) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    return add_node(nl, n);
}

int32_t cell_a(Netlist& nl, const rccm::CellConfigA& cfg, int32_t in_a, int32_t in_b,
               int field) {
    const int32_t a1 = shl(nl, in_a, cfg.shifts[0]);
    const int32_t a2 = shl(nl, in_a, cfg.shifts[1]);
    const int32_t a3 = shl(nl, in_a, cfg.shifts[2]);
    const int32_t b1 = shl(nl, in_b, cfg.shifts[3]);
    Node mux;
    mux.op = Node::Op::Mux;
    mux.field = field;
    mux.mux_in[0] = binop(nl, Node::Op::Add, a1, b1);
    mux.mux_in[1] = binop(nl, Node::Op::Add, a2, b1);
    mux.mux_in[2] = binop(nl, Node::Op::Add, a3, b1);
    switch (cfg.mapping) {
        case rccm::MuxMapping::PassB: mux.mux_in[3] = b1; break;
        case rccm::MuxMapping::SubTap1: mux.mux_in[3] = binop(nl, Node::Op::Sub, b1, a1); break;
        case rccm::MuxMapping::SubTap2: mux.mux_in[3] = binop(nl, Node::Op::Sub, b1, a2); break;
        case rccm::MuxMapping::SubTap3: mux.mux_in[3] = binop(nl, Node::Op::Sub, b1, a3); break;
    }
    return add_node(nl, mux);
}

int32_t cell_b(Netlist& nl, const rccm::CellConfigB& cfg, int32_t in_a, int32_t in_b,
               int field) {
    const int32_t a1 = shl(nl, in_a, cfg.shifts[0]);
    const int32_t a2 = shl(nl, in_a, cfg.shifts[1]);
    const int32_t b1 = shl(nl, in_b, cfg.shifts[2]);
    Node mux;
    mux.op = Node::Op::Mux;
    mux.field = field;
    mux.mux_in[0] = binop(nl, Node::Op::Sub, b1, a1);
    mux.mux_in[1] = binop(nl, Node::Op::Sub, b1, a2);
    mux.mux_in[2] = binop(nl, Node::Op::Sub, a1, b1);
    mux.mux_in[3] = binop(nl, Node::Op::Sub, a2, b1);
    return add_node(nl, mux);
}

} // namespace

Netlist build(const rccm::RccmConfig& config) {
    rccm::validate(config);
    Netlist nl;
    nl.arch = config.arch;
    Node input;
    input.op = Node::Op::Input;
    const int32_t x = add_node(nl, input);
    switch (config.arch) {
        case rccm::Arch::TwoAdd: {
            const int32_t t = cell_a(nl, config.cells_a[0], x, x, 0);
            nl.output = cell_b(nl, config.cell_b, t, x, 1);
            break;
        }
        case rccm::Arch::ThreeAdd: {
            const int32_t t1 = cell_a(nl, config.cells_a[0], x, x, 0);
            const int32_t t2 = cell_a(nl, config.cells_a[1], x, x, 1);
            nl.output = cell_b(nl, config.cell_b, t1, t2, 2);
            break;
        }
        case rccm::Arch::FourAdd: {
            const int32_t t1 = cell_a(nl, config.cells_a[0], x, x, 0);
            const int32_t t2 = cell_a(nl, config.cells_a[1], x, x, 1);
            const int32_t t3 = cell_a(nl, config.cells_a[2], t1, t2, 2);
            nl.output = cell_b(nl, config.cell_b, t3, x, 3);
            break;
        }
    }
    return nl;
}

void validate(const Netlist& netlist) {
    const int n = static_cast<int>(netlist.nodes.size());
    const int cells = rccm::adder_count(netlist.arch);
    auto check_ref = [&](int32_t ref, int32_t before) {
        if (ref < 0 || ref >= before)
            fail(ErrorCode::data, "netlist reference to undefined node (cycle or dangling edge)");
    };
    for (int32_t i = 0; i < n; ++i) {
        const Node& node = netlist.nodes[i];
        switch (node.op) {
            case Node::Op::Input:
                break;
            case Node::Op::Shl:
                check_ref(node.a, i);
                if (node.shift < 0 || node.shift > rccm::kMaxShift)
                    fail(ErrorCode::data, "netlist shift amount out of range");
                break;
            case Node::Op::Add:
            case Node::Op::Sub:
                check_ref(node.a, i);
                check_ref(node.b, i);
                break;
            case Node::Op::Mux:
                if (node.field < 0 || node.field >= cells)
                    fail(ErrorCode::data, "netlist mux field out of range");
                for (int32_t ref : node.mux_in) check_ref(ref, i);
                break;
        }
    }
    if (netlist.output < 0 || netlist.output >= n)
        fail(ErrorCode::data, "netlist output node missing");
}

int64_t simulate(const Netlist& netlist, uint32_t select, int64_t x) {
    if (select >= rccm::select_count(netlist.arch))
        fail(ErrorCode::out_of_range, "select out of range for architecture");
    validate(netlist);
    std::vector<int64_t> value(netlist.nodes.size(), 0);
    for (size_t i = 0; i < netlist.nodes.size(); ++i) {
        const Node& node = netlist.nodes[i];
        switch (node.op) {
            case Node::Op::Input: value[i] = x; break;
            case Node::Op::Shl: value[i] = value[node.a] << node.shift; break;
            case Node::Op::Add: value[i] = value[node.a] + value[node.b]; break;
            case Node::Op::Sub: value[i] = value[node.a] - value[node.b]; break;
            case Node::Op::Mux:
                value[i] = value[node.mux_in[(select >> (2 * node.field)) & 3u]];
                break;
        }
    }
    return value[netlist.output];
}

} // namespace addnet::netlist
