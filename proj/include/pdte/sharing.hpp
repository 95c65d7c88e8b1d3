#pragma once

#include "pdte/bigint.hpp"
#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"
#include "pdte/rng.hpp"

namespace pdte {

// XOR share of a single bit.
struct BitShare {
    bool bit = false;
};

inline bool reconstruct(const Pair<BitShare>& s) { return s[0].bit ^ s[1].bit; }

// XOR share of an ell-bit word, bitwise. Reconstruction is bitwise XOR of the
// two parties' vectors.
struct WordShare {
    BitVec v;

    WordShare() = default;
    explicit WordShare(BitVec bits) : v(std::move(bits)) {}
    explicit WordShare(size_t width) : v(width) {}
    size_t width() const { return v.size(); }
};

inline Pair<WordShare> share_boolean(const BitVec& secret, Rng& rng) {
    BitVec s0 = BitVec::random(rng, secret.size());
    return {WordShare(s0), WordShare(secret ^ s0)};
}

// Sharing where one party holds the secret in the clear and the other holds
// zeros. Correct (XOR reconstructs), used for feeding a party's private input
// into an interactive computation.
inline Pair<WordShare> private_input(const BitVec& secret, Party holder) {
    Pair<WordShare> out{WordShare(secret.size()), WordShare(secret.size())};
    out[idx(holder)].v = secret;
    return out;
}

inline BitVec reconstruct(const Pair<WordShare>& s) {
    if (s[0].width() != s[1].width()) throw WidthMismatch("reconstruct: widths differ");
    return s[0].v ^ s[1].v;
}

// Local boolean-sharing operations; all generate zero channel traffic.
inline WordShare xor_local(const WordShare& a, const WordShare& b) {
    if (a.width() != b.width()) throw WidthMismatch("xor_local");
    return WordShare(a.v ^ b.v);
}

inline WordShare xor_const(const WordShare& a, const BitVec& c, Party me) {
    if (a.width() != c.size()) throw WidthMismatch("xor_const");
    return me == Party::P0 ? WordShare(a.v ^ c) : a;
}

inline WordShare and_const(const WordShare& a, const BitVec& c) {
    if (a.width() != c.size()) throw WidthMismatch("and_const");
    return WordShare(a.v & c);
}

inline Pair<WordShare> xor_local(const Pair<WordShare>& a, const Pair<WordShare>& b) {
    return {xor_local(a[0], b[0]), xor_local(a[1], b[1])};
}
inline Pair<WordShare> xor_const(const Pair<WordShare>& a, const BitVec& c) {
    return {xor_const(a[0], c, Party::P0), xor_const(a[1], c, Party::P1)};
}
inline Pair<WordShare> and_const(const Pair<WordShare>& a, const BitVec& c) {
    return {and_const(a[0], c), and_const(a[1], c)};
}

inline WordShare slice(const WordShare& a, size_t start, size_t len) {
    return WordShare(a.v.slice(start, len));
}
inline Pair<WordShare> slice(const Pair<WordShare>& a, size_t start, size_t len) {
    return {slice(a[0], start, len), slice(a[1], start, len)};
}

// Additive share of a residue in Z_n.
struct ArithShare {
    mpz_class value;
    mpz_class modulus;

    ArithShare() : value(0), modulus(1) {}
    ArithShare(mpz_class v, mpz_class n) : value(std::move(v)), modulus(std::move(n)) {}
};

inline void check_moduli(const ArithShare& a, const ArithShare& b) {
    if (a.modulus != b.modulus) throw ModulusMismatch("arith share moduli differ");
}

inline Pair<ArithShare> share_arith(const mpz_class& secret, const mpz_class& n, Rng& rng) {
    mpz_class s0 = rng.mpz_below(n);
    return {ArithShare(s0, n), ArithShare(mod(secret - s0, n), n)};
}

inline mpz_class reconstruct(const Pair<ArithShare>& s) {
    check_moduli(s[0], s[1]);
    return mod(s[0].value + s[1].value, s[0].modulus);
}

inline ArithShare add_local(const ArithShare& a, const ArithShare& b) {
    check_moduli(a, b);
    return ArithShare(mod(a.value + b.value, a.modulus), a.modulus);
}

inline ArithShare sub_local(const ArithShare& a, const ArithShare& b) {
    check_moduli(a, b);
    return ArithShare(mod(a.value - b.value, a.modulus), a.modulus);
}

inline ArithShare add_const(const ArithShare& a, const mpz_class& c, Party me) {
    return me == Party::P0 ? ArithShare(mod(a.value + c, a.modulus), a.modulus) : a;
}

inline ArithShare scale_const(const ArithShare& a, const mpz_class& c) {
    return ArithShare(mulmod(a.value, c, a.modulus), a.modulus);
}

inline Pair<ArithShare> add_local(const Pair<ArithShare>& a, const Pair<ArithShare>& b) {
    return {add_local(a[0], b[0]), add_local(a[1], b[1])};
}
inline Pair<ArithShare> sub_local(const Pair<ArithShare>& a, const Pair<ArithShare>& b) {
    return {sub_local(a[0], b[0]), sub_local(a[1], b[1])};
}

// Multiplicative share over Z_{N^2}: the secret is the product of the two
// parties' residues mod N^2 (section 5.1.3's floor-bracket sharing).
struct MultShare {
    mpz_class value;
    mpz_class modulus;  // N^2

    MultShare() : value(1), modulus(1) {}
    MultShare(mpz_class v, mpz_class n2) : value(std::move(v)), modulus(std::move(n2)) {}
};

inline mpz_class reconstruct(const Pair<MultShare>& s) {
    if (s[0].modulus != s[1].modulus) throw ModulusMismatch("mult share moduli differ");
    return mulmod(s[0].value, s[1].value, s[0].modulus);
}

}  // namespace pdte
