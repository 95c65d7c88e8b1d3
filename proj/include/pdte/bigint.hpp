#pragma once

#include <gmpxx.h>

#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"

namespace pdte {

inline mpz_class mod(const mpz_class& a, const mpz_class& n) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline mpz_class mulmod(const mpz_class& a, const mpz_class& b, const mpz_class& n) {
    return mod(a * b, n);
}

inline mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& n) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline mpz_class invmod(const mpz_class& a, const mpz_class& n) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t()))
        throw ProtocolError("invmod: element not invertible");
    return r;
}

inline mpz_class gcd(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline uint32_t bit_length(const mpz_class& n) {
    if (n == 0) return 0;
    return uint32_t(mpz_sizeinbase(n.get_mpz_t(), 2));
}

// Bits needed to represent residues in [0, n).
inline uint32_t residue_bits(const mpz_class& n) {
    if (n <= 1) return 0;
    mpz_class top = n - 1;
    return bit_length(top);
}

// Wire encoding of residues: fixed-width big-endian, ceil(bits(n-1)/8) bytes.
inline size_t residue_wire_bytes(const mpz_class& n) {
    return bytes_for_bits(residue_bits(n));
}

inline Bytes mpz_to_be(const mpz_class& v, size_t width_bytes) {
    Bytes out(width_bytes, 0);
    if (v != 0) {
        size_t count = 0;
        Bytes raw((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
        mpz_export(raw.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
        if (count > width_bytes) throw ProtocolError("mpz_to_be: value too wide");
        std::copy(raw.begin(), raw.begin() + count, out.begin() + (width_bytes - count));
    }
    return out;
}

inline mpz_class mpz_from_be(const uint8_t* data, size_t len) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, data);
    return v;
}

inline mpz_class mpz_from_be(const Bytes& b) { return mpz_from_be(b.data(), b.size()); }

// Little-endian bit view of a nonnegative integer, LSB at index 0.
inline BitVec mpz_to_bits(const mpz_class& v, size_t width) {
    BitVec r(width);
    for (size_t i = 0; i < width; ++i)
        if (mpz_tstbit(v.get_mpz_t(), i)) r.set(i, true);
    if (bit_length(v) > width) throw WidthMismatch("mpz_to_bits: value exceeds width");
    return r;
}

inline mpz_class bits_to_mpz(const BitVec& v) {
    mpz_class r = 0;
    for (size_t i = v.size(); i-- > 0;) {
        r <<= 1;
        if (v.get(i)) r |= 1;
    }
    return r;
}

inline mpz_class pow2(uint64_t k) {
    mpz_class r = 1;
    r <<= k;
    return r;
}

}  // namespace pdte
