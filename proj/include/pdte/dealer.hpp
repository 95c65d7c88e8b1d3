#pragma once

#include <filesystem>
#include <fstream>

#include "pdte/channel.hpp"
#include "pdte/correlations.hpp"
#include "pdte/paillier.hpp"
#include "pdte/wire.hpp"

namespace pdte {
namespace dealer {

// ---- F_pre, trusted-dealer realization ---------------------------------
//
// The default preprocessing model: a local dealer samples correlations and
// hands each party its half, either in memory or through CorrelationFiles.
// The interactive BMT generators further down are the selectable alternative
// backends for modular triples.

inline void gen_boolean_triples(uint64_t count, Rng& rng, Pair<CorrelationStore>& out) {
    BitVec a = BitVec::random(rng, count);
    BitVec b = BitVec::random(rng, count);
    BitVec c = a & b;
    BitVec a0 = BitVec::random(rng, count);
    BitVec b0 = BitVec::random(rng, count);
    BitVec c0 = BitVec::random(rng, count);
    out[0].add_triples(a0, b0, c0);
    out[1].add_triples(a ^ a0, b ^ b0, c ^ c0);
}

// GenWBV: rdx uniform in [0, m); S has weight 1 exactly at rdx. The vector
// share is stored directly or as a DPF key (O(kappa log m) bits).
enum class WbvMode { Direct, Dpf };

inline std::pair<WbvShare, WbvShare> gen_wbv(uint64_t m, WbvMode mode, Rng& rng) {
    if (m < 1) throw ConfigInvalid("gen_wbv: m must be >= 1");
    uint64_t rdx = rng.below(m);
    uint32_t sigma = index_bits(m);
    WbvShare s, r;
    s.m = r.m = m;
    auto rdx_bool = share_boolean(BitVec::from_u64(rdx, sigma), rng);
    s.rdx_bool = rdx_bool[0];
    r.rdx_bool = rdx_bool[1];
    mpz_class mm(static_cast<unsigned long>(m));
    auto rdx_arith = share_arith(mpz_class(static_cast<unsigned long>(rdx)), mm, rng);
    s.rdx_arith = rdx_arith[0].value;
    r.rdx_arith = rdx_arith[1].value;
    if (mode == WbvMode::Direct) {
        BitVec unit(m);
        unit.set(rdx, true);
        s.direct = BitVec::random(rng, m);
        r.direct = unit ^ s.direct;
    } else {
        auto [k0, k1] = dpf::gen(rdx, true, m, rng);
        s.compressed = r.compressed = true;
        s.key = std::move(k0);
        r.key = std::move(k1);
    }
    return {std::move(s), std::move(r)};
}

inline void gen_b2a_bits(const mpz_class& n, uint64_t count, Rng& rng,
                         Pair<CorrelationStore>& out) {
    for (uint64_t i = 0; i < count; ++i) {
        bool r = rng.next_bit();
        bool r0 = rng.next_bit();
        mpz_class a0 = rng.mpz_below(n);
        mpz_class a1 = mod(mpz_class(r ? 1 : 0) - a0, n);
        out[0].add_b2a_bit(n, B2aBit{r0, a0});
        out[1].add_b2a_bit(n, B2aBit{r != r0, a1});
    }
}

inline void gen_precomputed_ot(uint64_t k, size_t width_bytes, uint64_t count, Party sender,
                               Rng& rng, Pair<CorrelationStore>& out) {
    if (k < 2) throw ConfigInvalid("gen_precomputed_ot: k must be >= 2");
    for (uint64_t i = 0; i < count; ++i) {
        OtSender s;
        s.pads.reserve(k);
        for (uint64_t j = 0; j < k; ++j) s.pads.push_back(rng.bytes(width_bytes));
        OtReceiver r;
        r.choice = rng.below(k);
        r.pad = s.pads[r.choice];
        out[idx(sender)].add_ot_sender(k, width_bytes, std::move(s));
        out[idx(other(sender))].add_ot_receiver(k, width_bytes, std::move(r));
    }
}

// Special BMT a*b = c mod n with a revealed to S and b to R (F_pre GenBMT on
// inputs (a,0) and (0,b)). s_party names which party plays S.
inline void gen_special_bmt(const mpz_class& n, uint64_t count, Party s_party, Rng& rng,
                            Pair<CorrelationStore>& out) {
    for (uint64_t i = 0; i < count; ++i) {
        mpz_class a = rng.mpz_below(n);
        mpz_class b = rng.mpz_below(n);
        mpz_class c = mulmod(a, b, n);
        mpz_class r = rng.mpz_below(n);
        out[idx(s_party)].add_bmt_s(n, SpecialBmtS{a, mod(-r, n), n});
        out[idx(other(s_party))].add_bmt_r(n, SpecialBmtR{b, mod(r + c, n), n});
    }
}

// GenBMT, general form: inputs are each party's additive shares of a and b;
// dealer returns additive shares of c = a*b mod n (the -r / r+c split of
// Fig. 5).
inline Pair<ArithShare> gen_bmt(const mpz_class& n, const Pair<ArithShare>& a,
                                const Pair<ArithShare>& b, Rng& rng) {
    mpz_class c = mulmod(mod(a[0].value + a[1].value, n), mod(b[0].value + b[1].value, n), n);
    mpz_class r = rng.mpz_below(n);
    return {ArithShare(mod(-r, n), n), ArithShare(mod(r + c, n), n)};
}

// ---- Interactive BMT generation (alternative backends) ------------------

// BMT from AHE: P0 holds a Paillier keypair and a; P1 holds b. P1 masks its
// homomorphic product with r + rho*n; decryption must stay below N, hence
// the MaskOverflow guard n^2 + n*2^lambda < N.
inline std::pair<SpecialBmtS, SpecialBmtR> gen_bmt_ahe(const mpz_class& n, const mpz_class& a,
                                                       const mpz_class& b,
                                                       const paillier::Keypair& kp,
                                                       uint32_t lambda, Pair<Rng*> rng,
                                                       Channel& ch) {
    const auto& pk = kp.pk();
    if (n * n + (n << lambda) >= pk.n) {
        throw MaskOverflow("gen_bmt_ahe: n^2 + n*2^lambda >= N, masked plaintext can wrap");
    }
    // P0 -> P1: Enc(a)
    {
        WireWriter w;
        paillier::Ciphertext x = paillier::encrypt(pk, mod(a, n), *rng[0]);
        w.residue(x.value, pk.n2);
        ch.send(Party::P0, w.take());
    }
    ch.flush_round();
    mpz_class r1;
    // P1 -> P0: x' = x^b * Enc(r + rho*n)
    {
        WireReader rd(ch.recv(Party::P1));
        paillier::Ciphertext x{rd.residue(pk.n2), pk.n2};
        r1 = rng[1]->mpz_below(n);
        mpz_class rho = rng[1]->mpz_bits(lambda);
        paillier::Ciphertext xp = paillier::hom_add(
            pk, paillier::hom_scale(pk, x, mod(b, n)),
            paillier::encrypt(pk, r1 + rho * n, *rng[1]));
        WireWriter w;
        w.residue(xp.value, pk.n2);
        ch.send(Party::P1, w.take());
    }
    ch.flush_round();
    WireReader rd(ch.recv(Party::P0));
    paillier::Ciphertext xp{rd.residue(pk.n2), pk.n2};
    mpz_class c0 = mod(kp.decrypt_crt(xp), n);
    return {SpecialBmtS{mod(a, n), c0, n}, SpecialBmtR{mod(b, n), mod(-r1, n), n}};
}

// Derandomized 1-of-k OT over width-byte messages, batched: one correction
// message (receiver), one payload message (sender), two dependency barriers.
// Receiver learns messages[i][choice_i].
inline std::vector<Bytes> ot_select_batch(Party sender, uint64_t k, size_t width,
                                          const std::vector<std::vector<Bytes>>& messages,
                                          const std::vector<uint64_t>& choices,
                                          Pair<CorrelationStore*> cs, Channel& ch) {
    Party receiver = other(sender);
    size_t count = messages.size();
    if (choices.size() != count) throw ProtocolError("ot batch size mismatch");
    std::vector<OtSender> snd;
    std::vector<OtReceiver> rcv;
    for (size_t i = 0; i < count; ++i) {
        snd.push_back(cs[idx(sender)]->take_ot_sender(k, width));
        rcv.push_back(cs[idx(receiver)]->take_ot_receiver(k, width));
    }
    // receiver -> sender: u_i = choice_i - c_i mod k
    {
        WireWriter w;
        mpz_class kk(static_cast<unsigned long>(k));
        for (size_t i = 0; i < count; ++i) {
            if (choices[i] >= k) throw IndexOutOfRange("ot choice out of range");
            uint64_t u = (choices[i] + k - rcv[i].choice % k) % k;
            w.residue(mpz_class(static_cast<unsigned long>(u)), kk);
        }
        ch.send(receiver, w.take());
    }
    ch.flush_round();
    std::vector<uint64_t> us(count);
    {
        WireReader rd(ch.recv(sender));
        mpz_class kk(static_cast<unsigned long>(k));
        for (size_t i = 0; i < count; ++i) us[i] = rd.residue(kk).get_ui();
        // sender -> receiver: y_j = m_{(j+u) mod k} ^ pad_j, all j
        WireWriter w;
        for (size_t i = 0; i < count; ++i) {
            if (messages[i].size() != k) throw ProtocolError("ot message count != k");
            for (uint64_t j = 0; j < k; ++j) {
                const Bytes& m = messages[i][(j + us[i]) % k];
                if (m.size() != width) throw WidthMismatch("ot message width");
                Bytes y(width);
                for (size_t t = 0; t < width; ++t) y[t] = m[t] ^ snd[i].pads[j][t];
                w.raw(y);
            }
        }
        ch.send(sender, w.take());
    }
    ch.flush_round();
    WireReader rd(ch.recv(receiver));
    std::vector<Bytes> out(count);
    for (size_t i = 0; i < count; ++i) {
        Bytes all = rd.raw(k * width);
        Bytes y(all.begin() + rcv[i].choice * width, all.begin() + (rcv[i].choice + 1) * width);
        for (size_t t = 0; t < width; ++t) y[t] ^= rcv[i].pad[t];
        out[i] = std::move(y);
    }
    return out;
}

// BMT from OT: P0 holds a (bit-decomposed as the OT choices), P1 holds b and
// acts as sender with messages (r_i, r_i + 2^i*b). Consumes ell 1-of-2 OTs
// where ell is the bit length of n's range.
inline std::pair<SpecialBmtS, SpecialBmtR> gen_bmt_ot(const mpz_class& n, const mpz_class& a,
                                                      const mpz_class& b, Rng& rng_p1,
                                                      Pair<CorrelationStore*> cs, Channel& ch) {
    uint32_t ell = residue_bits(n);
    size_t width = residue_wire_bytes(n);
    std::vector<std::vector<Bytes>> msgs(ell);
    std::vector<uint64_t> choices(ell);
    std::vector<mpz_class> r1(ell);
    mpz_class c1 = 0;
    for (uint32_t i = 0; i < ell; ++i) {
        r1[i] = rng_p1.mpz_below(n);
        mpz_class m1 = mod(r1[i] + (mpz_class(mod(b, n)) << i), n);
        msgs[i] = {mpz_to_be(r1[i], width), mpz_to_be(m1, width)};
        choices[i] = mpz_tstbit(a.get_mpz_t(), i);
        c1 = mod(c1 - r1[i], n);
    }
    std::vector<Bytes> got = ot_select_batch(Party::P1, 2, width, msgs, choices, cs, ch);
    mpz_class c0 = 0;
    for (uint32_t i = 0; i < ell; ++i) c0 = mod(c0 + mpz_from_be(got[i]), n);
    return {SpecialBmtS{mod(a, n), c0, n}, SpecialBmtR{mod(b, n), c1, n}};
}

// ---- Budgets ------------------------------------------------------------

// Exact per-run correlation requirements; the provisioning contract between
// the dealer and the protocols.
struct Budget {
    uint64_t triples = 0;
    std::map<std::string, std::pair<mpz_class, uint64_t>> b2a_bits;
    std::map<uint64_t, uint64_t> wbv;  // m -> count
    std::map<std::tuple<uint64_t, size_t, uint8_t>, uint64_t> ot;  // (k, width, sender)
    // key: (modulus, S party)
    std::map<std::pair<std::string, uint8_t>, std::pair<mpz_class, uint64_t>> special_bmt;

    void add_triples(uint64_t c) { triples += c; }
    void add_b2a(const mpz_class& n, uint64_t c) {
        auto& e = b2a_bits[n.get_str()];
        e.first = n;
        e.second += c;
    }
    void add_wbv(uint64_t m, uint64_t c) { wbv[m] += c; }
    void add_ot(uint64_t k, size_t width, Party sender, uint64_t c) {
        ot[{k, width, uint8_t(sender)}] += c;
    }
    void add_special_bmt(const mpz_class& n, Party s_party, uint64_t c) {
        auto& e = special_bmt[{n.get_str(), uint8_t(s_party)}];
        e.first = n;
        e.second += c;
    }
    void scale(uint64_t factor) {
        triples *= factor;
        for (auto& [k, v] : b2a_bits) v.second *= factor;
        for (auto& [k, v] : wbv) v *= factor;
        for (auto& [k, v] : ot) v *= factor;
        for (auto& [k, v] : special_bmt) v.second *= factor;
    }
    void merge(const Budget& o) {
        triples += o.triples;
        for (const auto& [k, v] : o.b2a_bits) {
            auto& e = b2a_bits[k];
            e.first = v.first;
            e.second += v.second;
        }
        for (const auto& [k, v] : o.wbv) wbv[k] += v;
        for (const auto& [k, v] : o.ot) ot[k] += v;
        for (const auto& [k, v] : o.special_bmt) {
            auto& e = special_bmt[k];
            e.first = v.first;
            e.second += v.second;
        }
    }
};

// ---- CorrelationFiles -----------------------------------------------------
//
// Little-endian packed binary, 32-byte header:
//   magic "PDCF" | version u8 | kind u8 | party u8 | flags u8
//   seed fingerprint u64 | record count u64 | kind parameter u64
// One file per (kind, pool key) per party. Header counts are validated
// against the body on load.

enum class FileKind : uint8_t {
    Triples = 1,
    B2aBits = 2,
    Wbv = 3,
    OtSender = 4,
    OtReceiver = 5,
    BmtS = 6,
    BmtR = 7,
};

namespace detail {

inline Bytes file_header(FileKind kind, Party party, uint8_t flags, uint64_t seed_fp,
                         uint64_t count, uint64_t param) {
    WireWriter w;
    w.u8('P');
    w.u8('D');
    w.u8('C');
    w.u8('F');
    w.u8(1);  // version
    w.u8(uint8_t(kind));
    w.u8(uint8_t(party));
    w.u8(flags);
    w.u64(seed_fp);
    w.u64(count);
    w.u64(param);
    return w.take();
}

inline void put_mpz(WireWriter& w, const mpz_class& v) {
    Bytes b = v == 0 ? Bytes{} : mpz_to_be(v, (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    w.u32(uint32_t(b.size()));
    w.raw(b);
}

inline mpz_class get_mpz(WireReader& r) {
    uint32_t len = r.u32();
    return mpz_from_be(r.raw(len));
}

inline void write_file(const std::filesystem::path& p, const Bytes& header, const Bytes& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigInvalid("cannot write correlation file: " + p.string());
    f.write(reinterpret_cast<const char*>(header.data()), std::streamsize(header.size()));
    f.write(reinterpret_cast<const char*>(body.data()), std::streamsize(body.size()));
}

}  // namespace detail

inline uint64_t write_files(const CorrelationStore& store, Party party,
                            const std::filesystem::path& dir, uint64_t seed_fp) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    uint64_t total = 0;
    auto emit = [&](FileKind kind, const std::string& name, uint8_t flags, uint64_t count,
                    uint64_t param, Bytes body) {
        Bytes hdr = detail::file_header(kind, party, flags, seed_fp, count, param);
        detail::write_file(dir / name, hdr, body);
        total += hdr.size() + body.size();
    };

    auto tp = store.triple_pool();
    {
        size_t left = tp.a.size() - tp.cursor;
        WireWriter w;
        w.bits(tp.a.slice(tp.cursor, left));
        w.bits(tp.b.slice(tp.cursor, left));
        w.bits(tp.c.slice(tp.cursor, left));
        emit(FileKind::Triples, "triples.cor", 0, left, 0, w.take());
    }
    size_t seq = 0;
    for (const auto& [key, pool] : store.b2a_pools()) {
        if (pool.empty()) continue;
        mpz_class n(key);
        WireWriter w;
        detail::put_mpz(w, n);
        BitVec flags(pool.size());
        for (size_t i = 0; i < pool.size(); ++i) flags.set(i, pool[i].bool_share);
        w.bits(flags);
        for (const auto& b : pool) w.residue(b.arith_share, n);
        emit(FileKind::B2aBits, "b2a_" + std::to_string(seq++) + ".cor", 0, pool.size(), 0,
             w.take());
    }
    for (const auto& [m, pool] : store.wbv_pools()) {
        if (pool.empty()) continue;
        bool compressed = pool.front().compressed;
        WireWriter w;
        mpz_class mm(static_cast<unsigned long>(m));
        for (const auto& s : pool) {
            if (s.compressed != compressed)
                throw ConfigInvalid("mixed wbv modes in one pool");
            w.bits(s.rdx_bool.v);
            w.residue(s.rdx_arith, mm);
            if (compressed) {
                Bytes kb = s.key.serialize();
                w.u32(uint32_t(kb.size()));
                w.raw(kb);
            } else {
                w.bits(s.direct);
            }
        }
        emit(FileKind::Wbv, "wbv_" + std::to_string(m) + ".cor", compressed ? 1 : 0,
             pool.size(), m, w.take());
    }
    for (const auto& [kw, pool] : store.ot_sender_pools()) {
        if (pool.empty()) continue;
        WireWriter w;
        for (const auto& s : pool)
            for (const auto& pad : s.pads) w.raw(pad);
        emit(FileKind::OtSender, "ot_" + std::to_string(kw.first) + "x" +
             std::to_string(kw.second) + ".cor", 0, pool.size(),
             (kw.first << 32) | kw.second, w.take());
    }
    for (const auto& [kw, pool] : store.ot_receiver_pools()) {
        if (pool.empty()) continue;
        WireWriter w;
        for (const auto& r : pool) {
            w.u64(r.choice);
            w.raw(r.pad);
        }
        emit(FileKind::OtReceiver, "ot_" + std::to_string(kw.first) + "x" +
             std::to_string(kw.second) + ".cor", 0, pool.size(),
             (kw.first << 32) | kw.second, w.take());
    }
    seq = 0;
    for (const auto& [key, pool] : store.bmt_s_pools()) {
        if (pool.empty()) continue;
        mpz_class n(key);
        WireWriter w;
        detail::put_mpz(w, n);
        for (const auto& t : pool) {
            w.residue(t.a, n);
            w.residue(t.c_share, n);
        }
        emit(FileKind::BmtS, "bmt_" + std::to_string(seq++) + ".cor", 0, pool.size(), 0, w.take());
    }
    seq = 0;
    for (const auto& [key, pool] : store.bmt_r_pools()) {
        if (pool.empty()) continue;
        mpz_class n(key);
        WireWriter w;
        detail::put_mpz(w, n);
        for (const auto& t : pool) {
            w.residue(t.b, n);
            w.residue(t.c_share, n);
        }
        emit(FileKind::BmtR, "bmt_" + std::to_string(seq++) + ".cor", 0, pool.size(), 0, w.take());
    }
    return total;
}

// Loads every .cor file in dir into a fresh store. Returns the store and the
// total file bytes (the offline provisioning cost attributed to this party).
inline std::pair<CorrelationStore, uint64_t> load_files(const std::filesystem::path& dir,
                                                        Party party) {
    namespace fs = std::filesystem;
    CorrelationStore store;
    uint64_t total = 0;
    if (!fs::exists(dir)) throw ConfigInvalid("correlation dir missing: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".cor") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::ifstream f(p, std::ios::binary);
        Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        total += data.size();
        WireReader r(std::move(data));
        if (r.u8() != 'P' || r.u8() != 'D' || r.u8() != 'C' || r.u8() != 'F')
            throw ConfigInvalid("bad correlation file magic: " + p.string());
        uint8_t version = r.u8();
        if (version != 1) throw ConfigInvalid("unsupported correlation file version");
        FileKind kind = FileKind(r.u8());
        Party fparty = Party(r.u8());
        uint8_t flags = r.u8();
        r.u64();  // seed fingerprint (informational)
        uint64_t count = r.u64();
        uint64_t param = r.u64();
        if (fparty != party)
            throw ConfigInvalid("correlation file for wrong party: " + p.string());
        switch (kind) {
            case FileKind::Triples: {
                BitVec a = r.bits(count), b = r.bits(count), c = r.bits(count);
                store.add_triples(a, b, c);
                break;
            }
            case FileKind::B2aBits: {
                mpz_class n = detail::get_mpz(r);
                BitVec bb = r.bits(count);
                for (uint64_t i = 0; i < count; ++i)
                    store.add_b2a_bit(n, B2aBit{bb.get(i), r.residue(n)});
                break;
            }
            case FileKind::Wbv: {
                uint64_t m = param;
                mpz_class mm(static_cast<unsigned long>(m));
                uint32_t sigma = index_bits(m);
                for (uint64_t i = 0; i < count; ++i) {
                    WbvShare s;
                    s.m = m;
                    s.rdx_bool = WordShare(r.bits(sigma));
                    s.rdx_arith = r.residue(mm);
                    if (flags & 1) {
                        s.compressed = true;
                        uint32_t len = r.u32();
                        Bytes kb = r.raw(len);
                        s.key = dpf::DpfKey::deserialize(kb.data(), kb.size());
                    } else {
                        s.direct = r.bits(m);
                    }
                    store.add_wbv(std::move(s));
                }
                break;
            }
            case FileKind::OtSender: {
                uint64_t k = param >> 32;
                size_t width = param & 0xffffffffu;
                for (uint64_t i = 0; i < count; ++i) {
                    OtSender s;
                    for (uint64_t j = 0; j < k; ++j) s.pads.push_back(r.raw(width));
                    store.add_ot_sender(k, width, std::move(s));
                }
                break;
            }
            case FileKind::OtReceiver: {
                uint64_t k = param >> 32;
                size_t width = param & 0xffffffffu;
                for (uint64_t i = 0; i < count; ++i) {
                    OtReceiver rr;
                    rr.choice = r.u64();
                    rr.pad = r.raw(width);
                    store.add_ot_receiver(k, width, std::move(rr));
                }
                break;
            }
            case FileKind::BmtS: {
                mpz_class n = detail::get_mpz(r);
                for (uint64_t i = 0; i < count; ++i) {
                    mpz_class a = r.residue(n), c = r.residue(n);
                    store.add_bmt_s(n, SpecialBmtS{a, c, n});
                }
                break;
            }
            case FileKind::BmtR: {
                mpz_class n = detail::get_mpz(r);
                for (uint64_t i = 0; i < count; ++i) {
                    mpz_class b = r.residue(n), c = r.residue(n);
                    store.add_bmt_r(n, SpecialBmtR{b, c, n});
                }
                break;
            }
            default:
                throw ConfigInvalid("unknown correlation file kind in " + p.string());
        }
        if (!r.done()) throw ConfigInvalid("trailing bytes in " + p.string());
    }
    return {std::move(store), total};
}

inline Pair<CorrelationStore> deal(const Budget& budget, WbvMode wbv_mode, Rng& rng) {
    Pair<CorrelationStore> out;
    Rng tr = rng.fork(1);
    gen_boolean_triples(budget.triples, tr, out);
    Rng br = rng.fork(2);
    for (const auto& [key, nv] : budget.b2a_bits) gen_b2a_bits(nv.first, nv.second, br, out);
    Rng wr = rng.fork(3);
    for (const auto& [m, count] : budget.wbv)
        for (uint64_t i = 0; i < count; ++i) {
            auto [s, r] = gen_wbv(m, wbv_mode, wr);
            out[0].add_wbv(std::move(s));
            out[1].add_wbv(std::move(r));
        }
    Rng or_ = rng.fork(4);
    for (const auto& [kw, count] : budget.ot)
        gen_precomputed_ot(std::get<0>(kw), std::get<1>(kw), count, Party(std::get<2>(kw)), or_,
                           out);
    Rng sr = rng.fork(5);
    for (const auto& [key, nv] : budget.special_bmt)
        gen_special_bmt(nv.first, nv.second, Party(key.second), sr, out);
    return out;
}

}  // namespace dealer
}  // namespace pdte
