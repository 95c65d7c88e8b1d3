#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "pdte/circuit.hpp"
#include "pdte/common.hpp"
#include "pdte/rng.hpp"
#include "pdte/sharing.hpp"

namespace pdte {

// The symmetric primitive F: {0,1}^kappa x {0,1}^ell_in -> {0,1}^ell_b, as an
// MPC-friendly SPN (LowMC-shaped: partial 3-bit s-box layer, dense F2 linear
// layers, per-round constants and key matrices). All matrices and constants
// are derived deterministically from a seed string, so the function is
// bit-exact across builds of this artifact; no interop with any external
// cipher is claimed. Two evaluation paths exist -- the fast plaintext
// evaluator and a boolean circuit for shared evaluation -- and they agree
// bit-exactly (tested exhaustively on the toy sets).
struct PrfParams {
    std::string id;
    uint32_t block_bits;   // ell_b: state width and output width
    uint32_t key_bits;     // kappa
    uint32_t input_bits;   // ell: domain width, <= block_bits
    uint32_t rounds;
    uint32_t sboxes;       // 3*sboxes <= block_bits
};

// Dense F2 matrix with a precomputed byte-lookup form ("four Russians") so
// plaintext PRF evaluation stays cheap enough to drive full-domain DPF
// expansion in tests.
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::vector<BitVec> rows, uint32_t cols)
        : rows_(std::move(rows)), cols_(cols), out_words_((rows_.size() + 63) / 64) {
        size_t npos = (cols_ + 7) / 8;
        tbl_.assign(npos * 256 * out_words_, 0);
        // column i as an output-width word vector
        std::vector<std::vector<uint64_t>> col(cols_, std::vector<uint64_t>(out_words_, 0));
        for (size_t r = 0; r < rows_.size(); ++r)
            for (uint32_t c = 0; c < cols_; ++c)
                if (rows_[r].get(c)) col[c][r >> 6] |= uint64_t(1) << (r & 63);
        for (size_t p = 0; p < npos; ++p) {
            for (uint32_t b = 1; b < 256; ++b) {
                uint64_t* dst = &tbl_[(p * 256 + b) * out_words_];
                const uint64_t* prev = &tbl_[(p * 256 + (b & (b - 1))) * out_words_];
                uint32_t bit = __builtin_ctz(b);
                uint32_t c = uint32_t(p * 8 + bit);
                for (size_t w = 0; w < out_words_; ++w)
                    dst[w] = prev[w] ^ (c < cols_ ? col[c][w] : 0);
            }
        }
    }

    BitVec apply(const BitVec& v) const {
        BitVec out(rows_.size());
        auto& ow = out.words();
        const auto& iw = v.words();
        size_t npos = (cols_ + 7) / 8;
        for (size_t p = 0; p < npos; ++p) {
            uint8_t byte = uint8_t(iw[p / 8] >> (8 * (p % 8)));
            const uint64_t* t = &tbl_[(p * 256 + byte) * out_words_];
            for (size_t w = 0; w < out_words_; ++w) ow[w] ^= t[w];
        }
        return out;
    }

    const std::vector<BitVec>& rows() const { return rows_; }
    size_t n_rows() const { return rows_.size(); }

private:
    std::vector<BitVec> rows_;
    uint32_t cols_ = 0;
    size_t out_words_ = 0;
    std::vector<uint64_t> tbl_;
};

class PrfInstance {
public:
    explicit PrfInstance(const PrfParams& p) : p_(p) {
        if (p.input_bits > p.block_bits)
            throw ConfigInvalid("prf: input wider than block");
        if (3 * p.sboxes > p.block_bits)
            throw ConfigInvalid("prf: sbox layer wider than block");
        Rng rng(Rng::hash_str("pdte-spn-v1|" + p.id));
        key_mats_.resize(p.rounds + 1);
        for (auto& m : key_mats_)
            m = F2Matrix(random_matrix(rng, p.block_bits, p.key_bits, false), p.key_bits);
        lin_mats_.resize(p.rounds);
        for (auto& m : lin_mats_)
            m = F2Matrix(random_matrix(rng, p.block_bits, p.block_bits, true), p.block_bits);
        consts_.resize(p.rounds);
        for (auto& c : consts_) c = BitVec::random(rng, p.block_bits);
    }

    const PrfParams& params() const { return p_; }

    BitVec eval(const BitVec& key, const BitVec& input) const {
        if (key.size() != p_.key_bits) throw WidthMismatch("prf: key width");
        if (input.size() != p_.input_bits) throw WidthMismatch("prf: input width");
        KeySchedule ks = schedule(key);
        return eval_with_schedule(ks, input);
    }

    // Precomputed round keys; lets PRG-style callers amortize the key
    // schedule across counter blocks.
    struct KeySchedule {
        std::vector<BitVec> round_keys;
    };

    KeySchedule schedule(const BitVec& key) const {
        if (key.size() != p_.key_bits) throw WidthMismatch("prf: key width");
        KeySchedule ks;
        ks.round_keys.resize(p_.rounds + 1);
        for (uint32_t r = 0; r <= p_.rounds; ++r) ks.round_keys[r] = key_mats_[r].apply(key);
        return ks;
    }

    BitVec eval_with_schedule(const KeySchedule& ks, const BitVec& input) const {
        BitVec st = input.resized(p_.block_bits);
        st ^= ks.round_keys[0];
        for (uint32_t r = 0; r < p_.rounds; ++r) {
            sbox_layer(st);
            st = lin_mats_[r].apply(st);
            st ^= consts_[r];
            st ^= ks.round_keys[r + 1];
        }
        return st;
    }

    // Circuit form: group A = key bits, group B = input bits, outputs =
    // block_bits. AND count 3*sboxes*rounds, AND depth = rounds.
    const Circuit& circuit() const {
        std::call_once(circuit_once_, [this] { circuit_ = build_circuit(); });
        return circuit_;
    }

    uint32_t and_count() const { return 3 * p_.sboxes * p_.rounds; }
    // r_F: GMW rounds of one shared evaluation = AND depth of the circuit.
    uint32_t r_f() const { return p_.rounds; }

private:
    static std::vector<BitVec> random_matrix(Rng& rng, uint32_t rows, uint32_t cols,
                                             bool invertible) {
        while (true) {
            std::vector<BitVec> m(rows);
            for (auto& row : m) row = BitVec::random(rng, cols);
            if (!invertible || is_invertible(m, cols)) return m;
        }
    }

    static bool is_invertible(const std::vector<BitVec>& m, uint32_t cols) {
        if (m.size() != cols) return false;
        std::vector<BitVec> a = m;
        for (uint32_t c = 0; c < cols; ++c) {
            uint32_t pivot = UINT32_MAX;
            for (uint32_t r = c; r < a.size(); ++r)
                if (a[r].get(c)) { pivot = r; break; }
            if (pivot == UINT32_MAX) return false;
            std::swap(a[c], a[pivot]);
            for (uint32_t r = 0; r < a.size(); ++r)
                if (r != c && a[r].get(c)) a[r] ^= a[c];
        }
        return true;
    }

    // (a, b, c) -> (a ^ b&c, a ^ b ^ a&c, a ^ b ^ c ^ a&b) on the first
    // 3*sboxes bits, identity on the rest.
    void sbox_layer(BitVec& st) const {
        for (uint32_t s = 0; s < p_.sboxes; ++s) {
            bool a = st.get(3 * s), b = st.get(3 * s + 1), c = st.get(3 * s + 2);
            st.set(3 * s, a ^ (b && c));
            st.set(3 * s + 1, a ^ b ^ (a && c));
            st.set(3 * s + 2, a ^ b ^ c ^ (a && b));
        }
    }

    Circuit build_circuit() const {
        CircuitBuilder b(p_.key_bits, p_.input_bits);
        std::vector<uint32_t> key(p_.key_bits), st(p_.block_bits);
        for (uint32_t i = 0; i < p_.key_bits; ++i) key[i] = b.input_a(i);

        auto xor_row = [&](const BitVec& row, const std::vector<uint32_t>& wires) {
            uint32_t acc = UINT32_MAX;
            for (size_t i = 0; i < wires.size(); ++i) {
                if (!row.get(i)) continue;
                acc = acc == UINT32_MAX ? wires[i] : b.make_xor(acc, wires[i]);
            }
            return acc == UINT32_MAX ? b.make_zero() : acc;
        };
        auto mat_apply = [&](const F2Matrix& m, const std::vector<uint32_t>& wires) {
            std::vector<uint32_t> out(m.n_rows());
            for (size_t r = 0; r < m.n_rows(); ++r) out[r] = xor_row(m.rows()[r], wires);
            return out;
        };

        std::vector<uint32_t> rk0 = mat_apply(key_mats_[0], key);
        for (uint32_t i = 0; i < p_.block_bits; ++i) {
            uint32_t in = i < p_.input_bits ? b.input_b(i) : b.make_zero();
            st[i] = b.make_xor(in, rk0[i]);
        }
        for (uint32_t r = 0; r < p_.rounds; ++r) {
            for (uint32_t s = 0; s < p_.sboxes; ++s) {
                uint32_t a = st[3 * s], bb = st[3 * s + 1], c = st[3 * s + 2];
                uint32_t na = b.make_xor(a, b.make_and(bb, c));
                uint32_t nb = b.make_xor(b.make_xor(a, bb), b.make_and(a, c));
                uint32_t nc = b.make_xor(b.make_xor(b.make_xor(a, bb), c), b.make_and(a, bb));
                st[3 * s] = na;
                st[3 * s + 1] = nb;
                st[3 * s + 2] = nc;
            }
            std::vector<uint32_t> lin = mat_apply(lin_mats_[r], st);
            std::vector<uint32_t> rk = mat_apply(key_mats_[r + 1], key);
            for (uint32_t i = 0; i < p_.block_bits; ++i) {
                uint32_t w = lin[i];
                if (consts_[r].get(i)) w = b.make_inv(w);
                st[i] = b.make_xor(w, rk[i]);
            }
        }
        b.set_outputs(st);
        return b.build();
    }

    PrfParams p_;
    std::vector<F2Matrix> key_mats_;
    std::vector<F2Matrix> lin_mats_;
    std::vector<BitVec> consts_;
    mutable std::once_flag circuit_once_;
    mutable Circuit circuit_;
};

// Parameter-set registry, by string id. "toy*" sets exist for exhaustive
// testing; "lowmc128" is the full-width default.
inline const PrfInstance& prf_registry(const std::string& id) {
    static std::map<std::string, PrfParams> specs = {
        {"toy8", {"toy8", 8, 8, 8, 3, 2}},
        {"toy16", {"toy16", 16, 16, 16, 4, 5}},
        {"toy32", {"toy32", 32, 32, 32, 4, 10}},
        {"lowmc128", {"lowmc128", 128, 128, 128, 14, 42}},
        {"prg128", {"prg128", 128, 128, 128, 10, 42}},
    };
    static std::map<std::string, std::unique_ptr<PrfInstance>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(id);
    if (it != cache.end()) return *it->second;
    auto spec = specs.find(id);
    if (spec == specs.end()) throw ConfigInvalid("unknown prf parameter set: " + id);
    auto inst = std::make_unique<PrfInstance>(spec->second);
    return *cache.emplace(id, std::move(inst)).first->second;
}

// Local shared-index concatenation i||j = (i << ceil(log2 B)) + j. The lower
// bits hold the public block id j: party 0 XORs j in, party 1 holds zeros
// there. Zero channel traffic. Result is zero-extended to out_width.
inline Pair<WordShare> index_concat(const Pair<WordShare>& i, uint64_t j, uint64_t blocks,
                                    uint32_t out_width) {
    uint32_t jbits = index_bits(blocks);
    if (i[0].width() + jbits > out_width)
        throw IndexWidthOverflow("index_concat: " + std::to_string(i[0].width()) + "+" +
                                 std::to_string(jbits) + " bits exceed input width " +
                                 std::to_string(out_width));
    if (j >= blocks) throw IndexOutOfRange("index_concat: block id out of range");
    Pair<WordShare> out{WordShare(out_width), WordShare(out_width)};
    for (int p = 0; p < 2; ++p)
        out[p].v.splice(jbits, i[p].v.resized(out_width - jbits));
    BitVec jv = BitVec::from_u64(j, out_width);
    out[0].v ^= jv;
    return out;
}

}  // namespace pdte
