#pragma once

#include <cstring>
#include <ostream>
#include <string>

#include "pdte/common.hpp"
#include "pdte/rng.hpp"

namespace pdte {

// Packed bit vector, LSB-first (bit i of the value lives at word i/64, bit
// i%64). The universal container for clear bit-strings, XOR shares, WBV
// vectors and SIMD wire lanes.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_u64(uint64_t v, size_t width) {
        if (width > 64) throw WidthMismatch("from_u64: width > 64");
        if (width < 64 && width > 0) v &= (uint64_t(1) << width) - 1;
        if (width == 0) v = 0;
        BitVec r(width);
        if (width) r.w_[0] = v;
        return r;
    }

    static BitVec random(Rng& rng, size_t n) {
        BitVec r(n);
        for (auto& w : r.w_) w = rng.next_u64();
        r.trim();
        return r;
    }

    static BitVec zeros(size_t n) { return BitVec(n); }

    size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(size_t i) const {
        return (w_[i >> 6] >> (i & 63)) & 1;
    }
    void set(size_t i, bool b) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (b) w_[i >> 6] |= mask; else w_[i >> 6] &= ~mask;
    }
    void flip(size_t i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

    uint64_t to_u64() const {
        if (n_ > 64) throw WidthMismatch("to_u64: width > 64");
        return n_ ? w_[0] : 0;
    }

    BitVec& operator^=(const BitVec& o) {
        check_width(o);
        for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    BitVec& operator&=(const BitVec& o) {
        check_width(o);
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    BitVec& operator|=(const BitVec& o) {
        check_width(o);
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { a ^= b; return a; }
    friend BitVec operator&(BitVec a, const BitVec& b) { a &= b; return a; }
    friend BitVec operator|(BitVec a, const BitVec& b) { a |= b; return a; }

    BitVec operator~() const {
        BitVec r = *this;
        for (auto& w : r.w_) w = ~w;
        r.trim();
        return r;
    }

    // XOR `o` into this vector iff `cond`; branch-free over whole words.
    void xor_if(bool cond, const BitVec& o) {
        check_width(o);
        uint64_t mask = cond ? ~uint64_t(0) : 0;
        for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i] & mask;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    size_t popcount() const {
        size_t c = 0;
        for (auto w : w_) c += size_t(__builtin_popcountll(w));
        return c;
    }

    bool parity() const {
        uint64_t acc = 0;
        for (auto w : w_) acc ^= w;
        return __builtin_parityll(acc);
    }

    bool and_parity(const BitVec& o) const {
        check_width(o);
        uint64_t acc = 0;
        for (size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
        return __builtin_parityll(acc);
    }

    BitVec slice(size_t start, size_t len) const {
        if (start + len > n_) throw WidthMismatch("slice out of range");
        BitVec r(len);
        size_t base = start >> 6, off = start & 63;
        for (size_t i = 0; i < r.w_.size(); ++i) {
            uint64_t lo = w_[base + i] >> off;
            uint64_t hi = (off && base + i + 1 < w_.size()) ? w_[base + i + 1] << (64 - off) : 0;
            r.w_[i] = lo | hi;
        }
        r.trim();
        return r;
    }

    void splice(size_t start, const BitVec& src) {
        if (start + src.n_ > n_) throw WidthMismatch("splice out of range");
        if ((start & 63) == 0) {
            size_t base = start >> 6;
            size_t full = src.n_ >> 6;
            for (size_t i = 0; i < full; ++i) w_[base + i] = src.w_[i];
            for (size_t i = full * 64; i < src.n_; ++i) set(start + i, src.get(i));
            return;
        }
        for (size_t i = 0; i < src.n_; ++i) set(start + i, src.get(i));
    }

    BitVec resized(size_t n) const {
        BitVec r(n);
        size_t upto = std::min(n, n_);
        for (size_t i = 0; i < upto; ++i) r.set(i, get(i));
        return r;
    }

    friend BitVec concat(const BitVec& a, const BitVec& b) {
        BitVec r(a.n_ + b.n_);
        r.splice(0, a);
        r.splice(a.n_, b);
        return r;
    }

    // Packed little-endian bytes, ceil(n/8) of them.
    Bytes to_bytes() const {
        Bytes out(bytes_for_bits(n_), 0);
        for (size_t i = 0; i < out.size(); ++i) {
            size_t word = i / 8, shift = 8 * (i % 8);
            if (word < w_.size()) out[i] = uint8_t(w_[word] >> shift);
        }
        return out;
    }

    static BitVec from_bytes(const Bytes& in, size_t n) {
        if (in.size() < bytes_for_bits(n)) throw WidthMismatch("from_bytes: short buffer");
        BitVec r(n);
        for (size_t i = 0; i < bytes_for_bits(n); ++i)
            r.w_[i / 8] |= uint64_t(in[i]) << (8 * (i % 8));
        r.trim();
        return r;
    }

    const std::vector<uint64_t>& words() const { return w_; }
    std::vector<uint64_t>& words() { return w_; }

private:
    void check_width(const BitVec& o) const {
        if (n_ != o.n_) throw WidthMismatch("bit vector width mismatch");
    }
    void trim() {
        if (n_ % 64) w_.back() &= (uint64_t(1) << (n_ % 64)) - 1;
    }

    size_t n_ = 0;
    std::vector<uint64_t> w_;
};

inline std::ostream& operator<<(std::ostream& os, const BitVec& v) {
    os << "0b";
    for (size_t i = v.size(); i-- > 0;) os << (v.get(i) ? '1' : '0');
    return os;
}

}  // namespace pdte
