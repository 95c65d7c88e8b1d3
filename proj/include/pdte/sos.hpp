#pragma once

#include "pdte/conv.hpp"
#include "pdte/dealer.hpp"
#include "pdte/gmw.hpp"
#include "pdte/paillier.hpp"

namespace pdte {
namespace sos {

enum class Backend : uint8_t { Ot, Prf, He };
enum class DeltaMode : uint8_t { Arith, Xor };

inline const char* to_string(Backend b) {
    switch (b) {
        case Backend::Ot: return "ot";
        case Backend::Prf: return "prf";
        default: return "he";
    }
}

struct SosConfig {
    Backend backend = Backend::Prf;
    uint64_t m = 0;          // array length
    uint32_t elem_bits = 0;  // ell_v
    Party owner = Party::P0; // the S side, holder of M
    DeltaMode delta_mode = DeltaMode::Arith;
    std::string prf_id = "lowmc128";
    uint32_t paillier_bits = 2048;
    uint32_t lambda = 40;
    // HE backend: reuse an existing keypair instead of generating one
    std::shared_ptr<paillier::Keypair> shared_keypair;

    // Selection domain: the stored array length. The xor delta mode pads to
    // the next power of two.
    uint64_t stored_m() const {
        return delta_mode == DeltaMode::Xor ? uint64_t(1) << index_bits(m) : m;
    }
    uint32_t sigma() const { return index_bits(stored_m()); }

    void validate() const {
        if (m < 1) throw ConfigInvalid("sos: m must be >= 1");
        if (elem_bits < 1) throw ConfigInvalid("sos: elem_bits must be >= 1");
        if (backend == Backend::He && paillier_bits < lambda + 3)
            throw ConfigInvalid("sos: paillier modulus too small for the statistical mask");
    }
};

struct SelectStats {
    uint64_t selects = 0;
    uint64_t scanned = 0;       // array elements touched by local scans
    uint64_t online_rounds = 0; // rounds consumed by select calls
    uint64_t online_bytes = 0;
    uint64_t setup_bytes = 0;
};

// Per-select correlation needs, for provisioning. idx_width is the bit width
// of the shared index the caller will pass to select().
inline dealer::Budget select_budget(const SosConfig& cfg, uint32_t idx_width) {
    cfg.validate();
    dealer::Budget b;
    uint64_t ms = cfg.stored_m();
    switch (cfg.backend) {
        case Backend::Ot: {
            b.add_b2a(mpz_class(static_cast<unsigned long>(ms)), idx_width);
            b.add_ot(std::max<uint64_t>(ms, 2), bytes_for_bits(cfg.elem_bits), cfg.owner, 1);
            break;
        }
        case Backend::Prf: {
            const PrfInstance& f = prf_registry(cfg.prf_id);
            uint64_t blocks = (cfg.elem_bits + f.params().block_bits - 1) / f.params().block_bits;
            b.add_wbv(ms, 1);
            if (cfg.delta_mode == DeltaMode::Arith)
                b.add_b2a(mpz_class(static_cast<unsigned long>(ms)), idx_width);
            b.add_triples(uint64_t(f.and_count()) * blocks);
            break;
        }
        case Backend::He: {
            // chunk layout must match setup(); see HeLayout
            uint32_t cap = cfg.paillier_bits - cfg.lambda - 2;
            uint32_t nchunks = (cfg.elem_bits + cap - 1) / cap;
            uint32_t cipher_bits = 2 * cfg.paillier_bits;  // bit length of N^2 residues
            b.add_wbv(ms, 1);
            if (cfg.delta_mode == DeltaMode::Arith)
                b.add_b2a(mpz_class(static_cast<unsigned long>(ms)), idx_width);
            // placeholder modulus: the true N^2 is only known after setup;
            // callers use instance.select_budget() once the instance exists
            (void)nchunks;
            (void)cipher_bits;
            break;
        }
    }
    return b;
}

// One logical F_sos instance; holds both parties' state (cooperative
// single-process execution) plus self-metering counters.
class SosInstance {
public:
    static SosInstance setup(const SosConfig& cfg, const std::vector<BitVec>& m_array,
                             Channel& ch, Rng& rng) {
        cfg.validate();
        if (m_array.size() != cfg.m) throw ConfigInvalid("sos setup: |M| != m");
        SosInstance inst;
        inst.cfg_ = cfg;
        uint64_t ms = cfg.stored_m();
        uint64_t before = ch.transcript().total_bytes();

        // normalize to elem_bits and extend with random dummies (xor-mode
        // padding; dummy contents are indistinguishable from masked data)
        std::vector<BitVec> stored;
        stored.reserve(ms);
        for (const auto& v : m_array) {
            if (v.size() > cfg.elem_bits) throw WidthMismatch("sos setup: element too wide");
            stored.push_back(v.resized(cfg.elem_bits));
        }
        for (uint64_t i = cfg.m; i < ms; ++i) stored.push_back(BitVec::random(rng, cfg.elem_bits));

        switch (cfg.backend) {
            case Backend::Ot:
                inst.clear_ = std::move(stored);  // S keeps M local; no setup traffic
                break;
            case Backend::Prf: {
                const PrfInstance& f = prf_registry(cfg.prf_id);
                inst.prf_ = &f;
                uint32_t bb = f.params().block_bits;
                inst.blocks_ = (cfg.elem_bits + bb - 1) / bb;
                uint32_t jbits = index_bits(inst.blocks_);
                if (cfg.sigma() + jbits > f.params().input_bits)
                    throw IndexWidthOverflow("sos setup: log2(m) + log2(B) exceeds prf input width");
                inst.sk_ = BitVec::random(rng, f.params().key_bits);
                PrfInstance::KeySchedule ks = f.schedule(inst.sk_);
                WireWriter w;
                inst.masked_.reserve(ms);
                for (uint64_t i = 0; i < ms; ++i) {
                    BitVec c(inst.blocks_ * bb);
                    for (uint64_t j = 0; j < inst.blocks_; ++j) {
                        uint64_t cat = (i << jbits) + j;
                        BitVec mask = f.eval_with_schedule(
                            ks, BitVec::from_u64(cat, 64).resized(f.params().input_bits));
                        BitVec blk = stored[i].size() > j * bb
                                         ? stored[i].slice(j * bb, std::min<size_t>(bb, stored[i].size() - j * bb))
                                         : BitVec(0);
                        c.splice(j * bb, blk.resized(bb) ^ mask);
                    }
                    w.bits(c);
                    inst.masked_.push_back(std::move(c));
                }
                ch.send(cfg.owner, w.take());  // the one-time linear transfer
                ch.flush_round();
                (void)ch.recv(other(cfg.owner));
                break;
            }
            case Backend::He: {
                inst.kp_ = cfg.shared_keypair
                               ? cfg.shared_keypair
                               : std::make_shared<paillier::Keypair>(
                                     paillier::Keypair::generate(cfg.paillier_bits, rng));
                const auto& pk = inst.kp_->pk();
                inst.cipher_bits_ = bit_length(pk.n2);
                uint32_t cap = cfg.paillier_bits - cfg.lambda - 2;
                for (uint32_t off = 0; off < cfg.elem_bits; off += cap)
                    inst.chunk_widths_.push_back(std::min(cap, cfg.elem_bits - off));
                WireWriter w;
                dealer::detail::put_mpz(w, pk.n);
                inst.encrypted_.assign(inst.chunk_widths_.size(), {});
                uint32_t off = 0;
                for (size_t k = 0; k < inst.chunk_widths_.size(); ++k) {
                    inst.encrypted_[k].reserve(ms);
                    for (uint64_t i = 0; i < ms; ++i) {
                        mpz_class chunk = bits_to_mpz(stored[i].slice(off, inst.chunk_widths_[k]));
                        paillier::Ciphertext c = paillier::encrypt(pk, chunk, rng);
                        w.residue(c.value, pk.n2);
                        inst.encrypted_[k].push_back(mpz_to_bits(c.value, inst.cipher_bits_));
                    }
                    off += inst.chunk_widths_[k];
                }
                ch.send(cfg.owner, w.take());
                ch.flush_round();
                (void)ch.recv(other(cfg.owner));
                break;
            }
        }
        inst.stats_.setup_bytes = ch.transcript().total_bytes() - before;
        return inst;
    }

    // Select: parties share M[idx mod m'] (m' = stored_m) in boolean form,
    // elem_bits wide. idx enters XOR-shared; its reconstruction must lie in
    // [0, m) for a meaningful result (wrap-around otherwise; shares hide it).
    Pair<WordShare> select(const Pair<WordShare>& idx_share, Pair<CorrelationStore*> cs,
                           Channel& ch, Rng& rng) {
        uint64_t rounds0 = ch.transcript().total_rounds();
        uint64_t bytes0 = ch.transcript().total_bytes();
        Pair<WordShare> out;
        switch (cfg_.backend) {
            case Backend::Ot: out = select_ot(idx_share, cs, ch, rng); break;
            case Backend::Prf: out = select_prf(idx_share, cs, ch); break;
            case Backend::He: out = select_he(idx_share, cs, ch, rng); break;
        }
        ++stats_.selects;
        stats_.online_rounds += ch.transcript().total_rounds() - rounds0;
        stats_.online_bytes += ch.transcript().total_bytes() - bytes0;
        return out;
    }

    const SelectStats& stats() const { return stats_; }
    const SosConfig& config() const { return cfg_; }

    // Exact per-select correlation needs of this instance.
    dealer::Budget select_budget(uint32_t idx_width) const {
        dealer::Budget b = sos::select_budget(cfg_, idx_width);
        if (cfg_.backend == Backend::He) {
            const auto& pk = kp_->pk();
            b.add_b2a(pk.n2, uint64_t(cipher_bits_) * chunk_widths_.size());
            b.add_special_bmt(pk.n2, cfg_.owner, chunk_widths_.size());
            b.add_triples(gmw::adder_circuit_multi(chunk_widths_).and_count);
        }
        return b;
    }

    const paillier::Keypair& keypair() const { return *kp_; }
    // white-box test hooks
    const std::vector<BitVec>& masked_array() const { return masked_; }
    const BitVec& prf_key() const { return sk_; }

private:
    // -- shared WBV machinery: produce this-party shares of C[idx] ---------
    //
    // arith mode: reveal delta = rdx - idx (mod m'); party share of C[idx] is
    // xor_i S[(i + delta) mod m'] * C[i]. xor mode (m' a power of two):
    // reveal delta = idx ^ rdx and use S[delta ^ i].
    template <typename Elem>
    Pair<BitVec> wbv_select(const std::vector<Elem>& array, size_t elem_width,
                            const Pair<WordShare>& idx_share, Pair<CorrelationStore*> cs,
                            Channel& ch) {
        uint64_t ms = cfg_.stored_m();
        Pair<WbvShare> wbv{cs[0]->take_wbv(ms), cs[1]->take_wbv(ms)};
        uint64_t delta = 0;
        if (cfg_.delta_mode == DeltaMode::Arith) {
            mpz_class mm(static_cast<unsigned long>(ms));
            auto idx_arith = conv::b2a(idx_share, mm, cs, ch);
            Pair<ArithShare> delta_sh{
                ArithShare(mod(wbv[0].rdx_arith - idx_arith[0].value, mm), mm),
                ArithShare(mod(wbv[1].rdx_arith - idx_arith[1].value, mm), mm)};
            delta = gmw::open_arith(delta_sh, ch).get_ui();
        } else {
            uint32_t sg = cfg_.sigma();
            Pair<WordShare> dl{
                WordShare(idx_share[0].v.resized(sg) ^ wbv[0].rdx_bool.v),
                WordShare(idx_share[1].v.resized(sg) ^ wbv[1].rdx_bool.v)};
            delta = gmw::open(dl, ch).to_u64();
        }
        Pair<BitVec> acc{BitVec(elem_width), BitVec(elem_width)};
        for (int p = 0; p < 2; ++p) {
            BitVec sv = wbv[p].vector_share();
            for (uint64_t i = 0; i < ms; ++i) {
                uint64_t si = cfg_.delta_mode == DeltaMode::Arith ? (i + delta) % ms : (delta ^ i);
                acc[p].xor_if(sv.get(si), array[i]);
            }
        }
        stats_.scanned += ms;
        return acc;
    }

    Pair<WordShare> select_ot(const Pair<WordShare>& idx_share, Pair<CorrelationStore*> cs,
                              Channel& ch, Rng& rng) {
        uint64_t ms = cfg_.stored_m();
        mpz_class mm(static_cast<unsigned long>(ms));
        size_t width = bytes_for_bits(cfg_.elem_bits);
        auto idx_arith = conv::b2a(idx_share, mm, cs, ch);
        // S rotates by its own arithmetic share and masks with r
        uint64_t shift_s = idx_arith[idx(cfg_.owner)].value.get_ui();
        BitVec r = BitVec::random(rng, cfg_.elem_bits);
        std::vector<Bytes> messages(std::max<uint64_t>(ms, 2), Bytes(width, 0));
        for (uint64_t i = 0; i < ms; ++i)
            messages[i] = (r ^ clear_[(i + shift_s) % ms]).to_bytes();
        uint64_t choice = idx_arith[idx(other(cfg_.owner))].value.get_ui() % std::max<uint64_t>(ms, 2);
        stats_.scanned += ms;
        auto got = dealer::ot_select_batch(cfg_.owner, std::max<uint64_t>(ms, 2), width,
                                           {messages}, {choice}, cs, ch);
        Pair<WordShare> out;
        out[idx(cfg_.owner)] = WordShare(r);
        out[idx(other(cfg_.owner))] = WordShare(BitVec::from_bytes(got[0], cfg_.elem_bits));
        return out;
    }

    Pair<WordShare> select_prf(const Pair<WordShare>& idx_share, Pair<CorrelationStore*> cs,
                               Channel& ch) {
        const PrfInstance& f = *prf_;
        uint32_t bb = f.params().block_bits;
        Pair<BitVec> e = wbv_select(masked_, inst_width(), idx_share, cs, ch);
        // B shared indexes idx||j, local; then B parallel F_sprf calls
        uint32_t sg = cfg_.sigma();
        Pair<WordShare> idx_sigma = slice(idx_share, 0, sg);
        std::vector<Pair<WordShare>> cats;
        for (uint64_t j = 0; j < blocks_; ++j)
            cats.push_back(index_concat(idx_sigma, j, std::max<uint64_t>(blocks_, 1),
                                        f.params().input_bits));
        auto fshares =
            gmw::shared_prf_eval_batch(f, cfg_.owner, sk_, cats, cs, ch);
        Pair<WordShare> out{WordShare(cfg_.elem_bits), WordShare(cfg_.elem_bits)};
        for (int p = 0; p < 2; ++p) {
            BitVec fcat(inst_width());
            for (uint64_t j = 0; j < blocks_; ++j) fcat.splice(j * bb, fshares[p][j].v);
            out[p].v = (e[p] ^ fcat).slice(0, cfg_.elem_bits);
        }
        return out;
    }

    Pair<WordShare> select_he(const Pair<WordShare>& idx_share, Pair<CorrelationStore*> cs,
                              Channel& ch, Rng& rng) {
        const auto& pk = kp_->pk();
        const mpz_class& n2 = pk.n2;
        const size_t nch = chunk_widths_.size();
        const uint32_t cw = cipher_bits_;
        const Party s = cfg_.owner, r = other(s);

        // shares of the selected ciphertext, per chunk
        std::vector<Pair<BitVec>> x(nch);
        {
            // one WBV drives all chunks of the element
            uint64_t ms = cfg_.stored_m();
            Pair<WbvShare> wbv{cs[0]->take_wbv(ms), cs[1]->take_wbv(ms)};
            uint64_t delta;
            mpz_class mm(static_cast<unsigned long>(ms));
            if (cfg_.delta_mode == DeltaMode::Arith) {
                auto idx_arith = conv::b2a(idx_share, mm, cs, ch);
                Pair<ArithShare> ds{ArithShare(mod(wbv[0].rdx_arith - idx_arith[0].value, mm), mm),
                                    ArithShare(mod(wbv[1].rdx_arith - idx_arith[1].value, mm), mm)};
                delta = gmw::open_arith(ds, ch).get_ui();
            } else {
                uint32_t sg = cfg_.sigma();
                Pair<WordShare> dl{WordShare(idx_share[0].v.resized(sg) ^ wbv[0].rdx_bool.v),
                                   WordShare(idx_share[1].v.resized(sg) ^ wbv[1].rdx_bool.v)};
                delta = gmw::open(dl, ch).to_u64();
            }
            Pair<BitVec> sv{wbv[0].vector_share(), wbv[1].vector_share()};
            for (size_t k = 0; k < nch; ++k) {
                x[k] = {BitVec(cw), BitVec(cw)};
                for (int p = 0; p < 2; ++p)
                    for (uint64_t i = 0; i < ms; ++i) {
                        uint64_t si =
                            cfg_.delta_mode == DeltaMode::Arith ? (i + delta) % ms : (delta ^ i);
                        x[k][p].xor_if(sv[p].get(si), encrypted_[k][i]);
                    }
            }
            stats_.scanned += ms;
        }

        // B2A of every chunk's ciphertext shares into Z_{N^2}; S's a2m first
        // messages (e_k = gamma_k^-1 - a_k) ride the same flush.
        Pair<std::vector<std::vector<B2aBit>>> bits;
        for (int p = 0; p < 2; ++p) {
            bits[p].resize(nch);
            for (size_t k = 0; k < nch; ++k)
                for (uint32_t i = 0; i < cw; ++i) bits[p][k].push_back(cs[p]->take_b2a_bit(n2));
        }
        std::vector<SpecialBmtS> bmt_s;
        std::vector<SpecialBmtR> bmt_r;
        std::vector<mpz_class> gamma(nch), gamma_inv(nch);
        {
            Pair<WireWriter> w;
            for (int p = 0; p < 2; ++p)
                for (size_t k = 0; k < nch; ++k) {
                    BitVec wk(cw);
                    for (uint32_t i = 0; i < cw; ++i)
                        wk.set(i, x[k][p].get(i) ^ bits[p][k][i].bool_share);
                    w[p].bits(wk);
                }
            for (size_t k = 0; k < nch; ++k) {
                bmt_s.push_back(cs[idx(s)]->take_bmt_s(n2));
                bmt_r.push_back(cs[idx(r)]->take_bmt_r(n2));
                do { gamma[k] = rng.mpz_below(n2); } while (gcd(gamma[k], pk.n) != 1);
                gamma_inv[k] = invmod(gamma[k], n2);
                w[idx(s)].residue(mod(gamma_inv[k] - bmt_s[k].a, n2), n2);
            }
            ch.send(Party::P0, w[0].take());
            ch.send(Party::P1, w[1].take());
        }
        ch.flush_round();
        // both parties derive their additive chunk shares from the opening
        std::vector<Pair<mpz_class>> xa(nch);
        std::vector<mpz_class> e_vals(nch);
        {
            Pair<WireReader> rd{WireReader(ch.recv(Party::P0)), WireReader(ch.recv(Party::P1))};
            Pair<std::vector<BitVec>> w_peer;
            for (int p = 0; p < 2; ++p)
                for (size_t k = 0; k < nch; ++k) w_peer[p].push_back(rd[p].bits(cw));
            for (size_t k = 0; k < nch; ++k) e_vals[k] = rd[idx(r)].residue(n2);
            for (size_t k = 0; k < nch; ++k) {
                BitVec wk(cw);
                for (uint32_t i = 0; i < cw; ++i)
                    wk.set(i, x[k][0].get(i) ^ bits[0][k][i].bool_share ^ w_peer[0].at(k).get(i));
                mpz_class p2 = 1;
                Pair<mpz_class> sh{0, 0};
                for (uint32_t i = 0; i < cw; ++i) {
                    for (int p = 0; p < 2; ++p) {
                        mpz_class term = wk.get(i)
                                             ? mpz_class((p == 0 ? 1 : 0)) - bits[p][k][i].arith_share
                                             : bits[p][k][i].arith_share;
                        sh[p] = mod(sh[p] + term * p2, n2);
                    }
                    p2 = mod(p2 * 2, n2);
                }
                xa[k] = sh;
            }
        }
        // R answers with f_k = <x>_r - b_k
        std::vector<mpz_class> f_vals(nch);
        {
            WireWriter w;
            for (size_t k = 0; k < nch; ++k)
                w.residue(mod(xa[k][1] - bmt_r[k].b, n2), n2);
            ch.send(r, w.take());
            ch.flush_round();
            WireReader rd(ch.recv(s));
            for (size_t k = 0; k < nch; ++k) f_vals[k] = rd.residue(n2);
        }
        // S finishes the conversion: sends <x>_s*gamma^-1 + a*f + <c>_s
        std::vector<mpz_class> mult_r(nch);
        {
            WireWriter w;
            for (size_t k = 0; k < nch; ++k)
                w.residue(mod(xa[k][0] * gamma_inv[k] + bmt_s[k].a * f_vals[k] + bmt_s[k].c_share,
                              n2), n2);
            ch.send(s, w.take());
            ch.flush_round();
            WireReader rd(ch.recv(r));
            for (size_t k = 0; k < nch; ++k) {
                mpz_class from_s = rd.residue(n2);
                mult_r[k] = mod(from_s + e_vals[k] * f_vals[k] + bmt_r[k].b * e_vals[k] +
                                bmt_r[k].c_share, n2);
            }
        }
        // R randomizes: x_beta = |x|_r * Enc(beta + rho*2^w)
        std::vector<mpz_class> beta(nch);
        {
            WireWriter w;
            for (size_t k = 0; k < nch; ++k) {
                beta[k] = rng.mpz_below(pow2(chunk_widths_[k]));
                mpz_class rho = rng.mpz_bits(cfg_.lambda);
                paillier::Ciphertext enc =
                    paillier::encrypt(pk, beta[k] + (rho << chunk_widths_[k]), rng);
                w.residue(mulmod(mult_r[k], enc.value, n2), n2);
            }
            ch.send(r, w.take());
            ch.flush_round();
        }
        // S decrypts each chunk mod 2^w; then a parallel-adder A2B
        Pair<BitVec> adder_in{BitVec(cfg_.elem_bits), BitVec(cfg_.elem_bits)};
        {
            WireReader rd(ch.recv(s));
            uint32_t off = 0;
            for (size_t k = 0; k < nch; ++k) {
                mpz_class xb = rd.residue(n2);
                paillier::Ciphertext prod{mulmod(gamma[k], xb, n2), n2};
                mpz_class ms_share = mod(kp_->decrypt_crt(prod), pow2(chunk_widths_[k]));
                mpz_class mr_share = mod(-beta[k], pow2(chunk_widths_[k]));
                adder_in[idx(s)].splice(off, mpz_to_bits(ms_share, chunk_widths_[k]));
                adder_in[idx(r)].splice(off, mpz_to_bits(mr_share, chunk_widths_[k]));
                off += chunk_widths_[k];
            }
        }
        const Circuit& adder = gmw::adder_circuit_multi(chunk_widths_);
        Pair<WordShare> in_a = private_input(adder_in[0], Party::P0);
        Pair<WordShare> in_b = private_input(adder_in[1], Party::P1);
        return gmw::eval_circuit(adder, in_a, in_b, cs, ch);
    }

    size_t inst_width() const { return blocks_ * prf_->params().block_bits; }

    SosConfig cfg_;
    SelectStats stats_;
    // ot
    std::vector<BitVec> clear_;
    // prf
    const PrfInstance* prf_ = nullptr;
    uint64_t blocks_ = 0;
    BitVec sk_;
    std::vector<BitVec> masked_;
    // he
    std::shared_ptr<paillier::Keypair> kp_;
    uint32_t cipher_bits_ = 0;
    std::vector<uint32_t> chunk_widths_;
    std::vector<std::vector<BitVec>> encrypted_;  // [chunk][element]
};

}  // namespace sos
}  // namespace pdte
