#pragma once

#include "pdte/gmw.hpp"
#include "pdte/paillier.hpp"

namespace pdte {
namespace conv {

// B2A: boolean sharing over Z_2^k -> additive sharing mod n (n arbitrary,
// including non-powers of two like m or N^2).
//
// Realization: dealer-precomputed dual-shared bits. For each input bit the
// parties hold XOR shares and additive shares (mod n) of the same random bit
// r_i; online they open w = x ^ r in ONE simultaneous flush and locally set
//   <x> = sum_i 2^i * (w_i + (1-2 w_i) <r_i>)  (mod n),
// the constant term going to P0. One online round, k correlations.
inline Pair<ArithShare> b2a(const Pair<WordShare>& x, const mpz_class& n,
                            Pair<CorrelationStore*> cs, Channel& ch) {
    const size_t k = x[0].width();
    if (x[1].width() != k) throw WidthMismatch("b2a: share widths differ");
    Pair<std::vector<B2aBit>> bits;
    for (int p = 0; p < 2; ++p) {
        bits[p].reserve(k);
        for (size_t i = 0; i < k; ++i) bits[p].push_back(cs[p]->take_b2a_bit(n));
    }
    Pair<BitVec> w_sh{BitVec(k), BitVec(k)};
    for (int p = 0; p < 2; ++p) {
        for (size_t i = 0; i < k; ++i)
            w_sh[p].set(i, x[p].v.get(i) ^ bits[p][i].bool_share);
        WireWriter wr;
        wr.bits(w_sh[p]);
        ch.send(Party(p), wr.take());
    }
    ch.flush_round();
    BitVec w_peer0 = WireReader(ch.recv(Party::P0)).bits(k);
    (void)ch.recv(Party::P1);
    BitVec w = w_sh[0] ^ w_peer0;

    Pair<ArithShare> out{ArithShare(0, n), ArithShare(0, n)};
    mpz_class p2 = 1;
    for (size_t i = 0; i < k; ++i) {
        for (int p = 0; p < 2; ++p) {
            mpz_class term;
            if (w.get(i)) {
                term = (p == 0 ? 1 : 0) - bits[p][i].arith_share;
            } else {
                term = bits[p][i].arith_share;
            }
            out[p].value = mod(out[p].value + term * p2, n);
        }
        p2 = mod(p2 * 2, n);
    }
    return out;
}

// A2B: additive sharing mod 2^w -> boolean sharing over Z_2^w, by jointly
// evaluating an addition circuit on the two parties' share bits (each side's
// share enters as its private input). Rounds = adder AND depth.
inline Pair<WordShare> a2b(const Pair<ArithShare>& x, Pair<CorrelationStore*> cs, Channel& ch,
                           gmw::EvalStats* stats = nullptr) {
    check_moduli(x[0], x[1]);
    const mpz_class& n = x[0].modulus;
    uint32_t w = residue_bits(n);
    if (n != pow2(w)) throw ConfigInvalid("a2b: modulus is not a power of two");
    const Circuit& adder = gmw::adder_circuit(w);
    Pair<WordShare> in_a = private_input(mpz_to_bits(x[0].value, w), Party::P0);
    Pair<WordShare> in_b = private_input(mpz_to_bits(x[1].value, w), Party::P1);
    return gmw::eval_circuit(adder, in_a, in_b, cs, ch, stats);
}

// Additive -> multiplicative sharing over Z_{N^2} (the share-conversion core
// of the HE-based selection). S samples gamma from Z*_{N^2}; a special BMT
// a*b = c (a at S, b at R, c shared) linearizes the cross term:
//   round 1:  S -> R: e = gamma^-1 - a        R -> S: f = <x>_r - b
//   round 2:  S -> R: <x>_s*gamma^-1 + a*f + <c>_s
// after which S holds gamma and R holds x*gamma^-1. Exactly two online
// rounds; the e/f exchange shares a flush.
struct A2mOptions {
    // test hook: force S's gamma instead of sampling
    const mpz_class* forced_gamma = nullptr;
};

inline Pair<MultShare> add_to_mult(const Pair<ArithShare>& x, const mpz_class& big_n,
                                   Pair<CorrelationStore*> cs, Channel& ch, Rng& rng_s,
                                   const A2mOptions& opt = {}) {
    check_moduli(x[0], x[1]);
    const mpz_class n2 = big_n * big_n;
    if (x[0].modulus != n2) throw ModulusMismatch("add_to_mult: shares not mod N^2");
    SpecialBmtS bs = cs[0]->take_bmt_s(n2);
    SpecialBmtR br = cs[1]->take_bmt_r(n2);
    if (bs.modulus != n2 || br.modulus != n2)
        throw BmtInvalid("add_to_mult: BMT modulus mismatch");

    mpz_class gamma;
    if (opt.forced_gamma) {
        gamma = *opt.forced_gamma;
        if (gcd(gamma, big_n) != 1) throw ProtocolError("forced gamma not invertible");
    } else {
        // gcd test against N suffices: gcd(g, N^2)=1 iff gcd(g, N)=1
        do { gamma = rng_s.mpz_below(n2); } while (gcd(gamma, big_n) != 1);
    }
    mpz_class gamma_inv = invmod(gamma, n2);

    {
        WireWriter w;
        w.residue(mod(gamma_inv - bs.a, n2), n2);
        ch.send(Party::P0, w.take());
        WireWriter w2;
        w2.residue(mod(x[1].value - br.b, n2), n2);
        ch.send(Party::P1, w2.take());
    }
    ch.flush_round();
    mpz_class e = WireReader(ch.recv(Party::P1)).residue(n2);
    mpz_class f = WireReader(ch.recv(Party::P0)).residue(n2);
    // S: <x_r * gamma^-1>_s = a*f + <c>_s ; sends its whole R-side shard
    mpz_class cross_s = mod(bs.a * f + bs.c_share, n2);
    {
        WireWriter w;
        w.residue(mod(x[0].value * gamma_inv + cross_s, n2), n2);
        ch.send(Party::P0, w.take());
    }
    ch.flush_round();
    mpz_class from_s = WireReader(ch.recv(Party::P1)).residue(n2);
    mpz_class cross_r = mod(e * f + br.b * e + br.c_share, n2);
    mpz_class xr = mod(from_s + cross_r, n2);
    return {MultShare(gamma, n2), MultShare(xr, n2)};
}

}  // namespace conv
}  // namespace pdte
