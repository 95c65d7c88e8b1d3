#pragma once

#include "pdte/bitvec.hpp"
#include "pdte/common.hpp"
#include "pdte/prf.hpp"
#include "pdte/rng.hpp"

namespace pdte {

// Two-key distributed point function for f_{alpha,beta}: {0,1}^nu -> {0,1},
// the standard GGM-tree construction (per-level seed+control-bit correction
// words, final output correction). Used to compress weight-1 bit vector
// correlations: each party expands its key over [0, m) to obtain its XOR
// share of the unit vector at alpha.
//
// The PRG is the prf module's 128-bit primitive in counter mode:
//   G(s) = F(s, 0) || F(s, 1) || F(s, 2), truncated to 2*(kappa+1) bits.
namespace dpf {

inline constexpr uint32_t kSeedBits = 128;

struct CorrectionWord {
    BitVec seed;  // kappa bits
    bool t_left;
    bool t_right;
};

struct DpfKey {
    uint8_t party;       // 0 or 1
    uint64_t domain;     // m
    BitVec root_seed;    // kappa bits
    std::vector<CorrectionWord> cw;  // ceil(log2 m) levels
    bool output_cw;      // final output correction (single-bit beta)

    uint32_t levels() const { return uint32_t(cw.size()); }

    // Payload size in bits: kappa + levels*(kappa+2) + 8 (output correction
    // padded to a byte).
    size_t payload_bits() const { return kSeedBits + cw.size() * (kSeedBits + 2) + 8; }

    Bytes serialize() const {
        Bytes out;
        auto put_u64 = [&](uint64_t v) {
            for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
        };
        out.push_back(party);
        put_u64(domain);
        Bytes seed = root_seed.to_bytes();
        out.insert(out.end(), seed.begin(), seed.end());
        BitVec tbits(2 * cw.size());
        for (size_t i = 0; i < cw.size(); ++i) {
            Bytes s = cw[i].seed.to_bytes();
            out.insert(out.end(), s.begin(), s.end());
            tbits.set(2 * i, cw[i].t_left);
            tbits.set(2 * i + 1, cw[i].t_right);
        }
        Bytes tb = tbits.to_bytes();
        out.insert(out.end(), tb.begin(), tb.end());
        out.push_back(output_cw ? 1 : 0);
        return out;
    }

    static DpfKey deserialize(const uint8_t* data, size_t len, size_t* consumed = nullptr) {
        size_t off = 0;
        auto need = [&](size_t n) {
            if (off + n > len) throw ParseError(0, "dpf key truncated");
        };
        DpfKey k;
        need(9);
        k.party = data[off++];
        uint64_t dom = 0;
        for (int i = 0; i < 8; ++i) dom |= uint64_t(data[off++]) << (8 * i);
        k.domain = dom;
        size_t seed_bytes = bytes_for_bits(kSeedBits);
        need(seed_bytes);
        k.root_seed = BitVec::from_bytes(Bytes(data + off, data + off + seed_bytes), kSeedBits);
        off += seed_bytes;
        uint32_t nu = index_bits(dom);
        k.cw.resize(nu);
        for (uint32_t i = 0; i < nu; ++i) {
            need(seed_bytes);
            k.cw[i].seed =
                BitVec::from_bytes(Bytes(data + off, data + off + seed_bytes), kSeedBits);
            off += seed_bytes;
        }
        size_t tbytes = bytes_for_bits(2 * nu);
        need(tbytes);
        BitVec tbits = BitVec::from_bytes(Bytes(data + off, data + off + tbytes), 2 * nu);
        off += tbytes;
        for (uint32_t i = 0; i < nu; ++i) {
            k.cw[i].t_left = tbits.get(2 * i);
            k.cw[i].t_right = tbits.get(2 * i + 1);
        }
        need(1);
        k.output_cw = data[off++] != 0;
        if (consumed) *consumed = off;
        return k;
    }
};

namespace detail {

struct Expansion {
    BitVec seed_l, seed_r;
    bool t_l, t_r;
};

// PRG call counter lives in the expander so tests can assert the O(m)
// full-expansion bound.
inline Expansion expand(const BitVec& seed, uint64_t* prg_calls = nullptr) {
    const PrfInstance& prg = prf_registry("prg128");
    PrfInstance::KeySchedule ks = prg.schedule(seed);
    BitVec b0 = prg.eval_with_schedule(ks, BitVec::from_u64(0, 64).resized(128));
    BitVec b1 = prg.eval_with_schedule(ks, BitVec::from_u64(1, 64).resized(128));
    BitVec b2 = prg.eval_with_schedule(ks, BitVec::from_u64(2, 64).resized(128));
    if (prg_calls) ++*prg_calls;
    Expansion e;
    e.seed_l = b0;
    e.seed_r = b1;
    e.t_l = b2.get(0);
    e.t_r = b2.get(1);
    return e;
}

}  // namespace detail

inline std::pair<DpfKey, DpfKey> gen(uint64_t alpha, bool beta, uint64_t m, Rng& rng) {
    if (alpha >= m) throw IndexOutOfRange("dpf_gen: alpha out of domain");
    uint32_t nu = index_bits(m);
    DpfKey k0, k1;
    k0.party = 0;
    k1.party = 1;
    k0.domain = k1.domain = m;
    k0.root_seed = BitVec::random(rng, kSeedBits);
    k1.root_seed = BitVec::random(rng, kSeedBits);
    k0.cw.resize(nu);
    k1.cw.resize(nu);

    BitVec s0 = k0.root_seed, s1 = k1.root_seed;
    bool t0 = false, t1 = true;
    for (uint32_t lvl = 0; lvl < nu; ++lvl) {
        bool a = (alpha >> (nu - 1 - lvl)) & 1;  // MSB-first path
        auto e0 = detail::expand(s0);
        auto e1 = detail::expand(s1);
        const BitVec& lose0 = a ? e0.seed_l : e0.seed_r;
        const BitVec& lose1 = a ? e1.seed_l : e1.seed_r;
        CorrectionWord cw;
        cw.seed = lose0 ^ lose1;
        cw.t_left = e0.t_l ^ e1.t_l ^ a ^ 1;
        cw.t_right = e0.t_r ^ e1.t_r ^ a;
        k0.cw[lvl] = k1.cw[lvl] = cw;

        BitVec keep0 = a ? e0.seed_r : e0.seed_l;
        BitVec keep1 = a ? e1.seed_r : e1.seed_l;
        bool tk0 = a ? e0.t_r : e0.t_l;
        bool tk1 = a ? e1.t_r : e1.t_l;
        bool tcw = a ? cw.t_right : cw.t_left;
        keep0.xor_if(t0, cw.seed);
        keep1.xor_if(t1, cw.seed);
        s0 = std::move(keep0);
        s1 = std::move(keep1);
        bool nt0 = tk0 ^ (t0 && tcw);
        bool nt1 = tk1 ^ (t1 && tcw);
        t0 = nt0;
        t1 = nt1;
    }
    bool out_cw = s0.get(0) ^ s1.get(0) ^ beta;
    // invariant: on-path control bits differ after every level
    if (!(t0 ^ t1)) throw ProtocolError("dpf_gen: control-bit invariant broken");
    k0.output_cw = k1.output_cw = out_cw;
    return {std::move(k0), std::move(k1)};
}

// Single-point evaluation: the party's XOR share of f_{alpha,beta}(x).
inline bool eval(const DpfKey& key, uint64_t x, uint64_t* prg_calls = nullptr) {
    if (x >= key.domain) throw IndexOutOfRange("dpf_eval: point out of domain");
    uint32_t nu = key.levels();
    BitVec s = key.root_seed;
    bool t = key.party == 1;
    for (uint32_t lvl = 0; lvl < nu; ++lvl) {
        bool b = (x >> (nu - 1 - lvl)) & 1;
        auto e = detail::expand(s, prg_calls);
        BitVec next = b ? e.seed_r : e.seed_l;
        bool tn = b ? e.t_r : e.t_l;
        if (t) {
            next ^= key.cw[lvl].seed;
            tn = tn ^ (b ? key.cw[lvl].t_right : key.cw[lvl].t_left);
        }
        s = std::move(next);
        t = tn;
    }
    return s.get(0) ^ (t && key.output_cw);
}

// Full-domain expansion: the party's weight-1-vector share, length m.
// Level-by-level breadth-first expansion, O(m) PRG calls.
inline BitVec eval_full(const DpfKey& key, uint64_t* prg_calls = nullptr) {
    uint32_t nu = key.levels();
    std::vector<BitVec> seeds{key.root_seed};
    std::vector<uint8_t> ts{uint8_t(key.party == 1)};
    for (uint32_t lvl = 0; lvl < nu; ++lvl) {
        std::vector<BitVec> nseeds(seeds.size() * 2);
        std::vector<uint8_t> nts(ts.size() * 2);
        for (size_t i = 0; i < seeds.size(); ++i) {
            auto e = detail::expand(seeds[i], prg_calls);
            e.seed_l.xor_if(ts[i], key.cw[lvl].seed);
            e.seed_r.xor_if(ts[i], key.cw[lvl].seed);
            nseeds[2 * i] = std::move(e.seed_l);
            nseeds[2 * i + 1] = std::move(e.seed_r);
            nts[2 * i] = e.t_l ^ (ts[i] & key.cw[lvl].t_left);
            nts[2 * i + 1] = e.t_r ^ (ts[i] & key.cw[lvl].t_right);
        }
        seeds = std::move(nseeds);
        ts = std::move(nts);
    }
    BitVec out(key.domain);
    for (uint64_t x = 0; x < key.domain; ++x)
        out.set(x, seeds[x].get(0) ^ (ts[x] && key.output_cw));
    return out;
}

}  // namespace dpf
}  // namespace pdte
