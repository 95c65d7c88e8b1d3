#pragma once

#include <mutex>

#include "pdte/channel.hpp"
#include "pdte/circuit.hpp"
#include "pdte/correlations.hpp"
#include "pdte/prf.hpp"
#include "pdte/wire.hpp"

namespace pdte {
namespace gmw {

// Open a boolean sharing: both parties send their share, one flush.
inline BitVec open(const Pair<WordShare>& x, Channel& ch) {
    size_t w = x[0].width();
    if (x[1].width() != w) throw WidthMismatch("open: share widths differ");
    for (int p = 0; p < 2; ++p) {
        WireWriter wr;
        wr.bits(x[p].v);
        ch.send(Party(p), wr.take());
    }
    ch.flush_round();
    BitVec peer0 = WireReader(ch.recv(Party::P0)).bits(w);  // P1's share
    BitVec peer1 = WireReader(ch.recv(Party::P1)).bits(w);  // P0's share
    (void)peer1;
    return x[0].v ^ peer0;
}

// Reveal to one party only; the other learns nothing new.
inline BitVec reveal_to(Party who, const Pair<WordShare>& x, Channel& ch) {
    size_t w = x[0].width();
    WireWriter wr;
    wr.bits(x[idx(other(who))].v);
    ch.send(other(who), wr.take());
    ch.flush_round();
    BitVec peer = WireReader(ch.recv(who)).bits(w);
    return x[idx(who)].v ^ peer;
}

// Open an additive sharing mod n.
inline mpz_class open_arith(const Pair<ArithShare>& x, Channel& ch) {
    check_moduli(x[0], x[1]);
    for (int p = 0; p < 2; ++p) {
        WireWriter wr;
        wr.residue(x[p].value, x[p].modulus);
        ch.send(Party(p), wr.take());
    }
    ch.flush_round();
    mpz_class from1 = WireReader(ch.recv(Party::P0)).residue(x[0].modulus);
    (void)ch.recv(Party::P1);
    return mod(x[0].value + from1, x[0].modulus);
}

struct EvalStats {
    uint64_t triples_used = 0;
    uint64_t rounds = 0;
};

// SIMD GMW evaluation: L parallel instances of the circuit share one
// schedule. AND gates of one topological layer are batched into a single
// flush, so online rounds = AND depth and triple consumption = L * AND count.
// Wire state per party is an L-bit lane vector per wire.
inline Pair<std::vector<WordShare>> eval_circuit_simd(const Circuit& c,
                                                      const Pair<std::vector<WordShare>>& in_a,
                                                      const Pair<std::vector<WordShare>>& in_b,
                                                      Pair<CorrelationStore*> cs, Channel& ch,
                                                      EvalStats* stats = nullptr) {
    const size_t lanes = in_a[0].size();
    if (in_b[0].size() != lanes || in_a[1].size() != lanes || in_b[1].size() != lanes)
        throw WidthMismatch("eval_circuit: lane count mismatch");
    for (size_t l = 0; l < lanes; ++l)
        for (int p = 0; p < 2; ++p)
            if (in_a[p][l].width() != c.in_a || in_b[p][l].width() != c.in_b)
                throw WidthMismatch("eval_circuit: input group width mismatch");
    if (cs[0]->triples_left() < uint64_t(c.and_count) * lanes ||
        cs[1]->triples_left() < uint64_t(c.and_count) * lanes)
        throw TriplesExhausted("eval_circuit: insufficient boolean triples (" +
                               std::to_string(uint64_t(c.and_count) * lanes) + " needed)");

    // gates grouped by AND layer, topo order within a layer
    std::vector<std::vector<uint32_t>> by_layer(c.and_depth + 1);
    for (uint32_t g = 0; g < c.gates.size(); ++g) by_layer[c.gate_layer[g]].push_back(g);

    Pair<std::vector<BitVec>> wires{std::vector<BitVec>(c.n_wires, BitVec(lanes)),
                                    std::vector<BitVec>(c.n_wires, BitVec(lanes))};
    for (int p = 0; p < 2; ++p) {
        for (size_t l = 0; l < lanes; ++l) {
            for (uint32_t i = 0; i < c.in_a; ++i)
                wires[p][i].set(l, in_a[p][l].v.get(i));
            for (uint32_t i = 0; i < c.in_b; ++i)
                wires[p][c.in_a + i].set(l, in_b[p][l].v.get(i));
        }
    }

    uint64_t rounds = 0;
    auto eval_free = [&](int p, const Gate& g) {
        switch (g.op) {
            case GateOp::Xor: wires[p][g.out] = wires[p][g.in0] ^ wires[p][g.in1]; break;
            case GateOp::Inv:
                wires[p][g.out] = p == 0 ? ~wires[p][g.in0] : wires[p][g.in0];
                break;
            default: throw ProtocolError("free-gate dispatch on AND");
        }
    };
    for (uint32_t g : by_layer[0]) {
        eval_free(0, c.gates[g]);
        eval_free(1, c.gates[g]);
    }

    for (uint32_t layer = 1; layer <= c.and_depth; ++layer) {
        std::vector<uint32_t> ands;
        for (uint32_t g : by_layer[layer])
            if (c.gates[g].op == GateOp::And) ands.push_back(g);
        const size_t nbits = ands.size() * lanes;

        Pair<TripleBits> trip{cs[0]->take_triples(nbits), cs[1]->take_triples(nbits)};
        Pair<BitVec> e_sh{BitVec(nbits), BitVec(nbits)};
        Pair<BitVec> f_sh{BitVec(nbits), BitVec(nbits)};
        for (int p = 0; p < 2; ++p) {
            for (size_t j = 0; j < ands.size(); ++j) {
                const Gate& g = c.gates[ands[j]];
                e_sh[p].splice(j * lanes, wires[p][g.in0]);
                f_sh[p].splice(j * lanes, wires[p][g.in1]);
            }
            e_sh[p] ^= trip[p].a;
            f_sh[p] ^= trip[p].b;
            WireWriter wr;
            wr.bits(e_sh[p]);
            wr.bits(f_sh[p]);
            ch.send(Party(p), wr.take());
        }
        ch.flush_round();
        ++rounds;
        Pair<BitVec> e_peer{BitVec(nbits), BitVec(nbits)}, f_peer{e_peer};
        for (int p = 0; p < 2; ++p) {
            WireReader rd(ch.recv(Party(p)));
            e_peer[p] = rd.bits(nbits);
            f_peer[p] = rd.bits(nbits);
        }
        BitVec e = e_sh[0] ^ e_peer[0];
        BitVec f = f_sh[0] ^ f_peer[0];
        for (int p = 0; p < 2; ++p) {
            // z = c ^ e&b ^ f&a (^ e&f at P0)
            BitVec z = trip[p].c ^ (e & trip[p].b) ^ (f & trip[p].a);
            if (p == 0) z ^= e & f;
            for (size_t j = 0; j < ands.size(); ++j)
                wires[p][c.gates[ands[j]].out] = z.slice(j * lanes, lanes);
        }
        for (uint32_t g : by_layer[layer])
            if (c.gates[g].op != GateOp::And) {
                eval_free(0, c.gates[g]);
                eval_free(1, c.gates[g]);
            }
    }

    if (stats) {
        stats->triples_used += uint64_t(c.and_count) * lanes;
        stats->rounds += rounds;
    }
    Pair<std::vector<WordShare>> out{std::vector<WordShare>(lanes, WordShare(c.outputs.size())),
                                     std::vector<WordShare>(lanes, WordShare(c.outputs.size()))};
    for (int p = 0; p < 2; ++p)
        for (size_t i = 0; i < c.outputs.size(); ++i) {
            const BitVec& lane_bits = wires[p][c.outputs[i]];
            for (size_t l = 0; l < lanes; ++l) out[p][l].v.set(i, lane_bits.get(l));
        }
    return out;
}

inline Pair<WordShare> eval_circuit(const Circuit& c, const Pair<WordShare>& in_a,
                                    const Pair<WordShare>& in_b, Pair<CorrelationStore*> cs,
                                    Channel& ch, EvalStats* stats = nullptr) {
    Pair<std::vector<WordShare>> a{std::vector<WordShare>{in_a[0]},
                                   std::vector<WordShare>{in_a[1]}};
    Pair<std::vector<WordShare>> b{std::vector<WordShare>{in_b[0]},
                                   std::vector<WordShare>{in_b[1]}};
    auto out = eval_circuit_simd(c, a, b, cs, ch, stats);
    return {out[0][0], out[1][0]};
}

// Cached circuit families.
inline const Circuit& less_than_circuit(uint32_t ell) {
    static std::map<uint32_t, Circuit> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(ell);
    if (it == cache.end()) it = cache.emplace(ell, build_less_than_circuit(ell)).first;
    return it->second;
}

inline const Circuit& adder_circuit(uint32_t w) {
    static std::map<uint32_t, Circuit> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(w);
    if (it == cache.end()) it = cache.emplace(w, build_adder_circuit(w)).first;
    return it->second;
}

inline const Circuit& adder_circuit_multi(const std::vector<uint32_t>& widths) {
    static std::map<std::vector<uint32_t>, Circuit> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(widths);
    if (it == cache.end()) it = cache.emplace(widths, build_multi_adder_circuit(widths)).first;
    return it->second;
}

// z = r ^ b*(l^r): selects l when b = 1, r when b = 0 (Algorithm-1 mux).
// One AND layer over the word width: width triples, one round.
inline Pair<WordShare> mux_select(const Pair<BitShare>& b, const Pair<WordShare>& l,
                                  const Pair<WordShare>& r, Pair<CorrelationStore*> cs,
                                  Channel& ch, EvalStats* stats = nullptr) {
    const size_t w = l[0].width();
    if (r[0].width() != w) throw WidthMismatch("mux_select: widths differ");
    Pair<WordShare> d = xor_local(l, r);
    // replicate the selector across the word and AND via one SIMD layer
    static std::map<uint32_t, Circuit> cache;
    static std::mutex mu;
    const Circuit* mc;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(uint32_t(w));
        if (it == cache.end()) {
            CircuitBuilder cb(1, uint32_t(w));
            std::vector<uint32_t> outs;
            for (uint32_t i = 0; i < w; ++i)
                outs.push_back(cb.make_and(cb.input_a(0), cb.input_b(i)));
            cb.set_outputs(outs);
            it = cache.emplace(uint32_t(w), cb.build()).first;
        }
        mc = &it->second;
    }
    Pair<WordShare> bw{WordShare(BitVec::from_u64(b[0].bit, 1)),
                       WordShare(BitVec::from_u64(b[1].bit, 1))};
    auto prod = eval_circuit(*mc, bw, d, cs, ch, stats);
    return xor_local(r, prod);
}

// Shared bit b = [x < t] over equal-width unsigned words.
inline Pair<BitShare> secure_less_than(const Pair<WordShare>& x, const Pair<WordShare>& t,
                                       Pair<CorrelationStore*> cs, Channel& ch,
                                       EvalStats* stats = nullptr) {
    if (x[0].width() != t[0].width()) throw WidthMismatch("secure_less_than: widths differ");
    const Circuit& c = less_than_circuit(uint32_t(x[0].width()));
    auto out = eval_circuit(c, x, t, cs, ch, stats);
    return {BitShare{out[0].v.get(0)}, BitShare{out[1].v.get(0)}};
}

// F_sprf: the key holder feeds its key bits as a private input; idx enters
// pre-shared. B parallel evaluations under one fixed key run as SIMD lanes
// of one schedule, so batch rounds equal single-eval rounds (= r_F).
inline Pair<std::vector<WordShare>> shared_prf_eval_batch(
    const PrfInstance& inst, Party key_holder, const BitVec& key,
    const std::vector<Pair<WordShare>>& indices, Pair<CorrelationStore*> cs, Channel& ch,
    EvalStats* stats = nullptr) {
    const Circuit& c = inst.circuit();
    const size_t lanes = indices.size();
    Pair<WordShare> key_sh = private_input(key, key_holder);
    Pair<std::vector<WordShare>> in_a{std::vector<WordShare>(lanes, key_sh[0]),
                                      std::vector<WordShare>(lanes, key_sh[1])};
    Pair<std::vector<WordShare>> in_b{std::vector<WordShare>(lanes), std::vector<WordShare>(lanes)};
    for (size_t l = 0; l < lanes; ++l) {
        if (indices[l][0].width() != inst.params().input_bits)
            throw WidthMismatch("shared_prf_eval: index width != prf input width");
        in_b[0][l] = indices[l][0];
        in_b[1][l] = indices[l][1];
    }
    return eval_circuit_simd(c, in_a, in_b, cs, ch, stats);
}

inline Pair<WordShare> shared_prf_eval(const PrfInstance& inst, Party key_holder,
                                       const BitVec& key, const Pair<WordShare>& index,
                                       Pair<CorrelationStore*> cs, Channel& ch,
                                       EvalStats* stats = nullptr) {
    auto out = shared_prf_eval_batch(inst, key_holder, key, {index}, cs, ch, stats);
    return {out[0][0], out[1][0]};
}

}  // namespace gmw
}  // namespace pdte
