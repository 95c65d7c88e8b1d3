#pragma once

#include "pdte/bigint.hpp"
#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"

namespace pdte {

// Message composition helpers. Multi-field messages are packed into one
// channel message per (party, flush) so the framing overhead stays one
// 4-byte prefix per logical barrier.
class WireWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void raw(const Bytes& b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    // Packed bits, ceil(n/8) bytes; width is protocol-known, not sent.
    void bits(const BitVec& v) { raw(v.to_bytes()); }
    // Fixed-width big-endian residue mod n.
    void residue(const mpz_class& v, const mpz_class& n) {
        raw(mpz_to_be(v, residue_wire_bytes(n)));
    }

    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class WireReader {
public:
    explicit WireReader(Bytes b) : buf_(std::move(b)) {}

    uint8_t u8() {
        need(1);
        return buf_[off_++];
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(buf_[off_++]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(buf_[off_++]) << (8 * i);
        return v;
    }
    Bytes raw(size_t n) {
        need(n);
        Bytes out(buf_.begin() + off_, buf_.begin() + off_ + n);
        off_ += n;
        return out;
    }
    BitVec bits(size_t width) { return BitVec::from_bytes(raw(bytes_for_bits(width)), width); }
    mpz_class residue(const mpz_class& n) {
        Bytes b = raw(residue_wire_bytes(n));
        return mpz_from_be(b);
    }

    bool done() const { return off_ == buf_.size(); }

private:
    void need(size_t n) const {
        if (off_ + n > buf_.size()) throw ProtocolError("message shorter than expected");
    }
    Bytes buf_;
    size_t off_ = 0;
};

}  // namespace pdte
