#pragma once

#include <algorithm>
#include <istream>
#include <sstream>
#include <string>

#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"

namespace pdte {

enum class GateOp : uint8_t { Xor, And, Inv };

struct Gate {
    GateOp op;
    uint32_t in0;
    uint32_t in1;  // unused for INV
    uint32_t out;
};

// Boolean circuit with two labeled input groups (party A wires first, then
// party B wires) and fan-in <= 2 gates in topological order. AND count and
// AND depth are computed on validation; XOR and INV are free.
struct Circuit {
    uint32_t n_wires = 0;
    uint32_t in_a = 0;
    uint32_t in_b = 0;
    std::vector<Gate> gates;
    std::vector<uint32_t> outputs;

    uint32_t and_count = 0;
    uint32_t and_depth = 0;
    std::vector<uint32_t> gate_layer;  // AND layer per gate (ANDs: 1..depth)

    uint32_t n_inputs() const { return in_a + in_b; }

    // Topology check + layer assignment. Every gate input must be a circuit
    // input or the output of an earlier gate; each wire is written once.
    void validate() {
        std::vector<int32_t> wire_layer(n_wires, -1);
        for (uint32_t i = 0; i < n_inputs(); ++i) {
            if (i >= n_wires) throw TopologyError("more inputs than wires");
            wire_layer[i] = 0;
        }
        gate_layer.assign(gates.size(), 0);
        and_count = 0;
        and_depth = 0;
        for (size_t g = 0; g < gates.size(); ++g) {
            const Gate& gate = gates[g];
            auto in_ok = [&](uint32_t w) {
                if (w >= n_wires || wire_layer[w] < 0)
                    throw TopologyError("gate " + std::to_string(g) +
                                        " references undriven wire " + std::to_string(w));
                return uint32_t(wire_layer[w]);
            };
            uint32_t l0 = in_ok(gate.in0);
            uint32_t l1 = gate.op == GateOp::Inv ? l0 : in_ok(gate.in1);
            if (gate.out >= n_wires)
                throw TopologyError("gate output wire out of range");
            if (wire_layer[gate.out] >= 0)
                throw TopologyError("wire " + std::to_string(gate.out) + " driven twice");
            uint32_t l = std::max(l0, l1);
            if (gate.op == GateOp::And) {
                ++l;
                ++and_count;
                and_depth = std::max(and_depth, l);
            }
            gate_layer[g] = l;
            wire_layer[gate.out] = int32_t(l);
        }
        for (uint32_t w : outputs)
            if (w >= n_wires || wire_layer[w] < 0)
                throw TopologyError("undriven output wire " + std::to_string(w));
    }

    // Plaintext evaluation; the independent oracle for every interactive
    // evaluation path.
    BitVec eval_plain(const BitVec& a, const BitVec& b) const {
        if (a.size() != in_a || b.size() != in_b)
            throw WidthMismatch("eval_plain: input group widths");
        std::vector<uint8_t> w(n_wires, 0);
        for (uint32_t i = 0; i < in_a; ++i) w[i] = a.get(i);
        for (uint32_t i = 0; i < in_b; ++i) w[in_a + i] = b.get(i);
        for (const Gate& g : gates) {
            switch (g.op) {
                case GateOp::Xor: w[g.out] = w[g.in0] ^ w[g.in1]; break;
                case GateOp::And: w[g.out] = w[g.in0] & w[g.in1]; break;
                case GateOp::Inv: w[g.out] = w[g.in0] ^ 1; break;
            }
        }
        BitVec out(outputs.size());
        for (size_t i = 0; i < outputs.size(); ++i) out.set(i, w[outputs[i]]);
        return out;
    }
};

// Bristol-fashion loader. Layout:
//   <n_gates> <n_wires>
//   <n_input_groups> <size each...>
//   <n_output_groups> <size each...>
//   (blank line)
//   one gate per line: <fan-in> <fan-out> <in wires...> <out wire> <OP>
// with OP in {XOR, AND, INV}, '#' starting a comment. Outputs are the last
// wires, in group order. Two input groups are expected (party A, party B);
// a single group is accepted as A with an empty B.
inline Circuit parse_circuit(std::istream& in) {
    Circuit c;
    size_t line_no = 0;
    auto next_line = [&](std::string& out) -> bool {
        while (std::getline(in, out)) {
            ++line_no;
            auto hash = out.find('#');
            if (hash != std::string::npos) out.erase(hash);
            if (out.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    std::string line;
    size_t n_gates = 0;
    if (!next_line(line)) throw ParseError(line_no, "missing header");
    {
        std::istringstream ss(line);
        if (!(ss >> n_gates >> c.n_wires)) throw ParseError(line_no, "bad gate/wire counts");
    }
    if (!next_line(line)) throw ParseError(line_no, "missing input group line");
    {
        std::istringstream ss(line);
        size_t groups = 0;
        if (!(ss >> groups) || groups < 1 || groups > 2)
            throw ParseError(line_no, "expected 1 or 2 input groups");
        uint32_t sz = 0;
        if (!(ss >> sz)) throw ParseError(line_no, "missing input group size");
        c.in_a = sz;
        if (groups == 2) {
            if (!(ss >> sz)) throw ParseError(line_no, "missing second input group size");
            c.in_b = sz;
        }
    }
    uint64_t n_out = 0;
    if (!next_line(line)) throw ParseError(line_no, "missing output group line");
    {
        std::istringstream ss(line);
        size_t groups = 0;
        if (!(ss >> groups) || groups < 1) throw ParseError(line_no, "bad output groups");
        for (size_t i = 0; i < groups; ++i) {
            uint32_t sz = 0;
            if (!(ss >> sz)) throw ParseError(line_no, "missing output group size");
            n_out += sz;
        }
    }

    c.gates.reserve(n_gates);
    for (size_t g = 0; g < n_gates; ++g) {
        if (!next_line(line)) throw ParseError(line_no, "unexpected end of gate list");
        std::istringstream ss(line);
        uint32_t fan_in = 0, fan_out = 0;
        if (!(ss >> fan_in >> fan_out)) throw ParseError(line_no, "bad gate arity");
        if (fan_out != 1) throw ParseError(line_no, "fan-out must be 1");
        if (fan_in != 1 && fan_in != 2) throw ParseError(line_no, "fan-in must be 1 or 2");
        uint32_t w[3] = {0, 0, 0};
        for (uint32_t i = 0; i < fan_in + 1; ++i)
            if (!(ss >> w[i])) throw ParseError(line_no, "missing wire id");
        std::string op;
        if (!(ss >> op)) throw ParseError(line_no, "missing gate op");
        Gate gate{};
        if (op == "XOR" && fan_in == 2) gate = {GateOp::Xor, w[0], w[1], w[2]};
        else if (op == "AND" && fan_in == 2) gate = {GateOp::And, w[0], w[1], w[2]};
        else if (op == "INV" && fan_in == 1) gate = {GateOp::Inv, w[0], 0, w[1]};
        else if (op == "NOT" && fan_in == 1) gate = {GateOp::Inv, w[0], 0, w[1]};
        else throw ParseError(line_no, "unknown gate op '" + op + "'");
        c.gates.push_back(gate);
    }

    if (n_out > c.n_wires) throw ParseError(line_no, "more outputs than wires");
    for (uint64_t i = 0; i < n_out; ++i)
        c.outputs.push_back(uint32_t(c.n_wires - n_out + i));
    c.validate();
    return c;
}

inline Circuit parse_circuit(const std::string& text) {
    std::istringstream ss(text);
    return parse_circuit(ss);
}

// ---- Programmatic circuit builders ------------------------------------
//
// Builder with free-XOR-friendly structure; used for the comparator, the
// addition circuit behind A2B, and the SPN PRF circuit.
class CircuitBuilder {
public:
    CircuitBuilder(uint32_t in_a, uint32_t in_b) {
        c_.in_a = in_a;
        c_.in_b = in_b;
        c_.n_wires = in_a + in_b;
    }

    uint32_t input_a(uint32_t i) const { return i; }
    uint32_t input_b(uint32_t i) const { return c_.in_a + i; }

    uint32_t gate(GateOp op, uint32_t a, uint32_t b = 0) {
        uint32_t out = c_.n_wires++;
        c_.gates.push_back({op, a, b, out});
        return out;
    }
    uint32_t make_xor(uint32_t a, uint32_t b) { return gate(GateOp::Xor, a, b); }
    uint32_t make_and(uint32_t a, uint32_t b) { return gate(GateOp::And, a, b); }
    uint32_t make_inv(uint32_t a) { return gate(GateOp::Inv, a); }

    // Constant wires are emulated: zero = x^x on input wire 0, one = ~zero.
    uint32_t make_zero() {
        if (zero_ == UINT32_MAX) zero_ = make_xor(0, 0);
        return zero_;
    }
    uint32_t make_one() {
        if (one_ == UINT32_MAX) one_ = make_inv(make_zero());
        return one_;
    }

    void set_outputs(std::vector<uint32_t> outs) { c_.outputs = std::move(outs); }

    Circuit build() {
        c_.validate();
        return std::move(c_);
    }

private:
    Circuit c_;
    uint32_t zero_ = UINT32_MAX;
    uint32_t one_ = UINT32_MAX;
};

// Strict unsigned comparison x < t over ell-bit inputs (x = group A, t =
// group B). Leaf layer lt_i = ~x_i & t_i, then a balanced (lt, eq) prefix
// tree: AND depth 1 + ceil(log2 ell).
inline Circuit build_less_than_circuit(uint32_t ell) {
    if (ell == 0) throw ConfigInvalid("comparator: width 0");
    CircuitBuilder b(ell, ell);
    struct Node { uint32_t lt, eq; };
    std::vector<Node> nodes(ell);
    for (uint32_t i = 0; i < ell; ++i) {
        uint32_t x = b.input_a(i), t = b.input_b(i);
        nodes[i].lt = b.make_and(b.make_inv(x), t);
        nodes[i].eq = b.make_inv(b.make_xor(x, t));
    }
    // Combine [lo .. hi] halves, high half more significant.
    while (nodes.size() > 1) {
        std::vector<Node> next;
        for (size_t i = 0; i + 1 < nodes.size(); i += 2) {
            const Node& lo = nodes[i];
            const Node& hi = nodes[i + 1];
            Node n;
            n.lt = b.make_xor(hi.lt, b.make_and(hi.eq, lo.lt));
            n.eq = b.make_and(hi.eq, lo.eq);
            next.push_back(n);
        }
        if (nodes.size() % 2) next.push_back(nodes.back());
        nodes = std::move(next);
    }
    b.set_outputs({nodes[0].lt});
    return b.build();
}

namespace detail {

// Emit a Sklansky prefix adder for one chunk inside `b`; input wires given,
// sum wires appended to `sums`.
inline void emit_adder(CircuitBuilder& b, const std::vector<uint32_t>& in_a,
                       const std::vector<uint32_t>& in_b, std::vector<uint32_t>& sums) {
    const uint32_t w = uint32_t(in_a.size());
    std::vector<uint32_t> p(w), g(w);
    for (uint32_t i = 0; i < w; ++i) {
        p[i] = b.make_xor(in_a[i], in_b[i]);
        g[i] = b.make_and(in_a[i], in_b[i]);
    }
    std::vector<uint32_t> G = g, P = p;
    for (uint32_t span = 1; span < w; span *= 2) {
        std::vector<uint32_t> Gn = G, Pn = P;
        for (uint32_t i = span; i < w; ++i) {
            if ((i / span) % 2 != 1) continue;
            uint32_t j = (i / span) * span - 1;
            Gn[i] = b.make_xor(G[i], b.make_and(P[i], G[j]));
            if (i / span > 1) Pn[i] = b.make_and(P[i], P[j]);
        }
        G = std::move(Gn);
        P = std::move(Pn);
    }
    sums.push_back(p[0]);
    for (uint32_t i = 1; i < w; ++i) sums.push_back(b.make_xor(p[i], G[i - 1]));
}

}  // namespace detail

// Independent parallel additions mod 2^{w_k} of consecutive chunks of the two
// input groups; one schedule, AND depth 1 + ceil(log2 max w_k).
inline Circuit build_multi_adder_circuit(const std::vector<uint32_t>& widths) {
    uint32_t total = 0;
    for (uint32_t w : widths) {
        if (w == 0) throw ConfigInvalid("adder: width 0");
        total += w;
    }
    CircuitBuilder b(total, total);
    std::vector<uint32_t> sums;
    uint32_t off = 0;
    for (uint32_t w : widths) {
        std::vector<uint32_t> in_a(w), in_b(w);
        for (uint32_t i = 0; i < w; ++i) {
            in_a[i] = b.input_a(off + i);
            in_b[i] = b.input_b(off + i);
        }
        detail::emit_adder(b, in_a, in_b, sums);
        off += w;
    }
    b.set_outputs(sums);
    return b.build();
}

// w-bit addition mod 2^w of the two input groups, Sklansky parallel-prefix
// carry network: AND depth 1 + ceil(log2 w) for w >= 2.
inline Circuit build_adder_circuit(uint32_t w) {
    return build_multi_adder_circuit({w});
}

}  // namespace pdte
