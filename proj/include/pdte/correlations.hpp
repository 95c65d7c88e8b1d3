#pragma once

#include <deque>
#include <map>

#include "pdte/bigint.hpp"
#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"
#include "pdte/dpf.hpp"
#include "pdte/sharing.hpp"

namespace pdte {

// One party's share of a boolean Beaver triple batch: bit i of (a, b, c) is
// one triple share. Reconstructed, a.b = c bitwise.
struct TripleBits {
    BitVec a, b, c;
};

// One party's piece of a dual-shared random bit: r is XOR-shared and
// additively shared mod n. Consumed by B2A.
struct B2aBit {
    bool bool_share;
    mpz_class arith_share;
};

// Weight-1 bit vector correlation, one party's piece. The vector share is
// either stored directly or as a DPF key that expands to it. rdx is carried
// in both boolean (sigma-bit) and additive (mod m) form.
struct WbvShare {
    uint64_t m = 0;
    WordShare rdx_bool;       // sigma = ceil(log2 m) bits
    mpz_class rdx_arith;      // additive share mod m
    BitVec direct;            // length m if !compressed
    bool compressed = false;
    dpf::DpfKey key;          // if compressed

    BitVec vector_share(uint64_t* prg_calls = nullptr) const {
        return compressed ? dpf::eval_full(key, prg_calls) : direct;
    }

    size_t payload_bits() const {
        size_t rdx_bits = rdx_bool.width() + 8 * residue_wire_bytes(mpz_class(m == 0 ? 1 : m));
        return rdx_bits + (compressed ? key.payload_bits() : m);
    }
};

// Precomputed 1-of-k OT over fixed-width byte-string messages. Sender holds k
// random pads; receiver holds a random choice c and pad_c. Online
// derandomization turns this into chosen-message OT.
struct OtSender {
    std::vector<Bytes> pads;
};
struct OtReceiver {
    uint64_t choice = 0;
    Bytes pad;
};

// Special-form modular triple (Fig. 8 step 5(a)): S knows a, R knows b, c is
// additively shared, a*b = c mod n. The general F_pre GenBMT form shares all
// three; see dealer::gen_bmt.
struct SpecialBmtS {
    mpz_class a, c_share, modulus;
};
struct SpecialBmtR {
    mpz_class b, c_share, modulus;
};

// General-form modular triple share.
struct ModularTripleShare {
    mpz_class a, b, c, modulus;
};

// Per-party pool of dealer-issued randomness. Pools are keyed so one store
// can serve several concurrent sub-protocols (different moduli / vector
// lengths / OT shapes); consumption order is part of the protocol and both
// parties' stores advance in lockstep.
class CorrelationStore {
public:
    // -- boolean triples (bulk bit streams) --
    void add_triples(const BitVec& a, const BitVec& b, const BitVec& c) {
        triple_a_ = concat(triple_a_, a);
        triple_b_ = concat(triple_b_, b);
        triple_c_ = concat(triple_c_, c);
    }

    TripleBits take_triples(size_t count) {
        if (triple_cursor_ + count > triple_a_.size())
            throw TriplesExhausted("boolean triple pool exhausted (" +
                                   std::to_string(triple_a_.size() - triple_cursor_) +
                                   " left, " + std::to_string(count) + " requested)");
        TripleBits t{triple_a_.slice(triple_cursor_, count),
                     triple_b_.slice(triple_cursor_, count),
                     triple_c_.slice(triple_cursor_, count)};
        triple_cursor_ += count;
        triples_consumed_ += count;
        return t;
    }

    size_t triples_left() const { return triple_a_.size() - triple_cursor_; }
    uint64_t triples_consumed() const { return triples_consumed_; }

    // -- dual-shared bits, keyed by modulus --
    void add_b2a_bit(const mpz_class& n, B2aBit bit) { b2a_[n.get_str()].push_back(std::move(bit)); }

    B2aBit take_b2a_bit(const mpz_class& n) {
        auto it = b2a_.find(n.get_str());
        if (it == b2a_.end() || it->second.empty())
            throw CorrelationExhausted("b2a bit pool exhausted for modulus " + n.get_str());
        B2aBit b = std::move(it->second.front());
        it->second.pop_front();
        ++b2a_consumed_;
        return b;
    }

    size_t b2a_bits_left(const mpz_class& n) const {
        auto it = b2a_.find(n.get_str());
        return it == b2a_.end() ? 0 : it->second.size();
    }
    uint64_t b2a_bits_consumed() const { return b2a_consumed_; }

    // -- weight-1 bit vectors, keyed by length --
    void add_wbv(WbvShare w) { wbv_[w.m].push_back(std::move(w)); }

    WbvShare take_wbv(uint64_t m) {
        auto it = wbv_.find(m);
        if (it == wbv_.end() || it->second.empty())
            throw CorrelationExhausted("wbv pool exhausted for m=" + std::to_string(m));
        WbvShare w = std::move(it->second.front());
        it->second.pop_front();
        ++wbv_consumed_;
        return w;
    }
    uint64_t wbv_consumed() const { return wbv_consumed_; }

    // -- precomputed OTs, keyed by (k, message bytes) --
    void add_ot_sender(uint64_t k, size_t width, OtSender s) {
        ot_s_[{k, width}].push_back(std::move(s));
    }
    void add_ot_receiver(uint64_t k, size_t width, OtReceiver r) {
        ot_r_[{k, width}].push_back(std::move(r));
    }
    OtSender take_ot_sender(uint64_t k, size_t width) {
        return take_keyed(ot_s_, {k, width}, "ot sender");
    }
    OtReceiver take_ot_receiver(uint64_t k, size_t width) {
        return take_keyed(ot_r_, {k, width}, "ot receiver");
    }

    // -- special BMTs, keyed by modulus --
    void add_bmt_s(const mpz_class& n, SpecialBmtS t) { bmt_s_[n.get_str()].push_back(std::move(t)); }
    void add_bmt_r(const mpz_class& n, SpecialBmtR t) { bmt_r_[n.get_str()].push_back(std::move(t)); }
    SpecialBmtS take_bmt_s(const mpz_class& n) { return take_keyed(bmt_s_, n.get_str(), "special bmt"); }
    SpecialBmtR take_bmt_r(const mpz_class& n) { return take_keyed(bmt_r_, n.get_str(), "special bmt"); }

    // Read-only pool views for file serialization and provisioning checks.
    struct TriplePoolView {
        const BitVec& a;
        const BitVec& b;
        const BitVec& c;
        size_t cursor;
    };
    TriplePoolView triple_pool() const { return {triple_a_, triple_b_, triple_c_, triple_cursor_}; }
    const std::map<std::string, std::deque<B2aBit>>& b2a_pools() const { return b2a_; }
    const std::map<uint64_t, std::deque<WbvShare>>& wbv_pools() const { return wbv_; }
    const std::map<std::pair<uint64_t, size_t>, std::deque<OtSender>>& ot_sender_pools() const {
        return ot_s_;
    }
    const std::map<std::pair<uint64_t, size_t>, std::deque<OtReceiver>>& ot_receiver_pools() const {
        return ot_r_;
    }
    const std::map<std::string, std::deque<SpecialBmtS>>& bmt_s_pools() const { return bmt_s_; }
    const std::map<std::string, std::deque<SpecialBmtR>>& bmt_r_pools() const { return bmt_r_; }

private:
    template <typename M>
    typename M::mapped_type::value_type take_keyed(M& m, const typename M::key_type& key,
                                                   const char* what) {
        auto it = m.find(key);
        if (it == m.end() || it->second.empty())
            throw CorrelationExhausted(std::string(what) + " pool exhausted");
        auto v = std::move(it->second.front());
        it->second.pop_front();
        return v;
    }

    BitVec triple_a_, triple_b_, triple_c_;
    size_t triple_cursor_ = 0;
    uint64_t triples_consumed_ = 0;
    uint64_t b2a_consumed_ = 0;
    uint64_t wbv_consumed_ = 0;
    std::map<std::string, std::deque<B2aBit>> b2a_;
    std::map<uint64_t, std::deque<WbvShare>> wbv_;
    std::map<std::pair<uint64_t, size_t>, std::deque<OtSender>> ot_s_;
    std::map<std::pair<uint64_t, size_t>, std::deque<OtReceiver>> ot_r_;
    std::map<std::string, std::deque<SpecialBmtS>> bmt_s_;
    std::map<std::string, std::deque<SpecialBmtR>> bmt_r_;
};

}  // namespace pdte
