#include <catch2/catch_amalgamated.hpp>

#include "pdte/dealer.hpp"
#include "pdte/gmw.hpp"

using namespace pdte;

namespace {

Pair<CorrelationStore> fresh_triples(uint64_t count, uint64_t seed = 77) {
    Rng rng(seed);
    Pair<CorrelationStore> cs;
    dealer::gen_boolean_triples(count, rng, cs);
    return cs;
}

Pair<CorrelationStore*> ptrs(Pair<CorrelationStore>& cs) { return {&cs[0], &cs[1]}; }

}  // namespace

TEST_CASE("identity circuit passes inputs through") {
    // pass-through: output = a XOR 0
    Circuit c = parse_circuit("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 XOR\n");
    Rng rng(1);
    auto cs = fresh_triples(0);
    Channel ch;
    for (uint64_t v = 0; v < 2; ++v) {
        auto in_a = share_boolean(BitVec::from_u64(v, 1), rng);
        auto in_b = share_boolean(BitVec::from_u64(0, 1), rng);
        auto out = gmw::eval_circuit(c, in_a, in_b, ptrs(cs), ch);
        CHECK(reconstruct(out).to_u64() == v);
    }
    CHECK(ch.transcript().total_rounds() == 0);
}

TEST_CASE("single AND consumes one triple and one round") {
    Circuit c = parse_circuit("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 AND\n");
    Rng rng(2);
    auto cs = fresh_triples(1);
    Channel ch;
    ch.set_phase(Phase::Online);
    gmw::EvalStats stats;
    auto in_a = share_boolean(BitVec::from_u64(1, 1), rng);
    auto in_b = share_boolean(BitVec::from_u64(1, 1), rng);
    auto out = gmw::eval_circuit(c, in_a, in_b, ptrs(cs), ch, &stats);
    CHECK(reconstruct(out).to_u64() == 1);
    CHECK(stats.triples_used == 1);
    CHECK(stats.rounds == 1);
    CHECK(ch.transcript().rounds(Phase::Online) == 1);
    CHECK(cs[0].triples_left() == 0);
}

TEST_CASE("random circuits match the plaintext evaluator") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        // random 50-gate circuit
        CircuitBuilder b(4, 4);
        uint32_t top = 8;
        std::vector<uint32_t> wires;
        for (uint32_t i = 0; i < 8; ++i) wires.push_back(i);
        for (int g = 0; g < 50; ++g) {
            uint32_t x = wires[rng.below(wires.size())];
            uint32_t y = wires[rng.below(wires.size())];
            switch (rng.below(3)) {
                case 0: top = b.make_and(x, y); break;
                case 1: top = b.make_xor(x, y); break;
                default: top = b.make_inv(x); break;
            }
            wires.push_back(top);
        }
        b.set_outputs({wires.back(), wires[wires.size() / 2]});
        Circuit c = b.build();
        auto cs = fresh_triples(uint64_t(c.and_count) * 100, 100 + trial);
        Channel ch;
        for (int i = 0; i < 100; ++i) {
            BitVec a = BitVec::random(rng, 4), v = BitVec::random(rng, 4);
            auto out = gmw::eval_circuit(c, share_boolean(a, rng), share_boolean(v, rng),
                                         ptrs(cs), ch);
            REQUIRE(reconstruct(out) == c.eval_plain(a, v));
        }
    }
}

TEST_CASE("rounds equal AND depth and triples equal AND count") {
    Rng rng(4);
    const Circuit& c = gmw::adder_circuit(16);
    auto cs = fresh_triples(c.and_count);
    Channel ch;
    ch.set_phase(Phase::Online);
    gmw::EvalStats stats;
    auto in_a = share_boolean(BitVec::from_u64(1234, 16), rng);
    auto in_b = share_boolean(BitVec::from_u64(4321, 16), rng);
    auto out = gmw::eval_circuit(c, in_a, in_b, ptrs(cs), ch, &stats);
    CHECK(reconstruct(out).to_u64() == 1234 + 4321);
    CHECK(stats.rounds == c.and_depth);
    CHECK(ch.transcript().rounds(Phase::Online) == c.and_depth);
    CHECK(stats.triples_used == c.and_count);
}

TEST_CASE("triple exhaustion is detected") {
    Circuit c = parse_circuit("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 AND\n");
    Rng rng(5);
    auto cs = fresh_triples(0);
    Channel ch;
    auto in_a = share_boolean(BitVec::from_u64(1, 1), rng);
    auto in_b = share_boolean(BitVec::from_u64(1, 1), rng);
    CHECK_THROWS_AS(gmw::eval_circuit(c, in_a, in_b, ptrs(cs), ch), TriplesExhausted);
}

TEST_CASE("secure comparison") {
    Rng rng(6);
    SECTION("equality yields 0 (strict less-than)") {
        auto cs = fresh_triples(1000);
        Channel ch;
        auto x = share_boolean(BitVec::from_u64(9, 4), rng);
        auto b = gmw::secure_less_than(x, x, ptrs(cs), ch);
        CHECK(reconstruct(b) == false);
    }
    SECTION("3 < 5 at ell=4") {
        auto cs = fresh_triples(1000);
        Channel ch;
        auto x = share_boolean(BitVec::from_u64(3, 4), rng);
        auto t = share_boolean(BitVec::from_u64(5, 4), rng);
        CHECK(reconstruct(gmw::secure_less_than(x, t, ptrs(cs), ch)) == true);
    }
    SECTION("round budget is log-depth") {
        auto cs = fresh_triples(1000);
        Channel ch;
        ch.set_phase(Phase::Online);
        auto x = share_boolean(BitVec::from_u64(77, 64), rng);
        auto t = share_boolean(BitVec::from_u64(200, 64), rng);
        CHECK(reconstruct(gmw::secure_less_than(x, t, ptrs(cs), ch)) == true);
        CHECK(ch.transcript().rounds(Phase::Online) == 1 + 6);  // leaf + log2(64)
    }
    SECTION("exhaustive 8-bit domain via simd lanes") {
        const Circuit& c = gmw::less_than_circuit(8);
        const size_t lanes = 65536;
        auto cs = fresh_triples(uint64_t(c.and_count) * lanes);
        Channel ch;
        Pair<std::vector<WordShare>> in_a, in_b;
        for (uint32_t x = 0; x < 256; ++x)
            for (uint32_t t = 0; t < 256; ++t) {
                auto sx = share_boolean(BitVec::from_u64(x, 8), rng);
                auto st = share_boolean(BitVec::from_u64(t, 8), rng);
                for (int p = 0; p < 2; ++p) {
                    in_a[p].push_back(sx[p]);
                    in_b[p].push_back(st[p]);
                }
            }
        auto out = gmw::eval_circuit_simd(c, in_a, in_b, ptrs(cs), ch);
        size_t lane = 0;
        for (uint32_t x = 0; x < 256; ++x)
            for (uint32_t t = 0; t < 256; ++t, ++lane) {
                bool got = out[0][lane].v.get(0) ^ out[1][lane].v.get(0);
                REQUIRE(got == (x < t));
            }
    }
}

TEST_CASE("mux_select") {
    Rng rng(7);
    SECTION("b=1 selects l, b=0 selects r") {
        auto cs = fresh_triples(1000);
        Channel ch;
        auto l = share_boolean(BitVec::from_u64(0xAA, 8), rng);
        auto r = share_boolean(BitVec::from_u64(0x55, 8), rng);
        Pair<BitShare> one{BitShare{true}, BitShare{false}};
        Pair<BitShare> zero{BitShare{false}, BitShare{false}};
        CHECK(reconstruct(gmw::mux_select(one, l, r, ptrs(cs), ch)).to_u64() == 0xAA);
        CHECK(reconstruct(gmw::mux_select(zero, l, r, ptrs(cs), ch)).to_u64() == 0x55);
    }
    SECTION("exhaustive 4-bit against the plaintext mux, one round each") {
        auto cs = fresh_triples(16 * 16 * 2 * 4);
        Channel ch;
        ch.set_phase(Phase::Online);
        uint64_t rounds = 0;
        for (uint64_t l = 0; l < 16; ++l)
            for (uint64_t r = 0; r < 16; ++r)
                for (int bv = 0; bv < 2; ++bv) {
                    auto sl = share_boolean(BitVec::from_u64(l, 4), rng);
                    auto sr = share_boolean(BitVec::from_u64(r, 4), rng);
                    bool b0 = rng.next_bit();
                    Pair<BitShare> b{BitShare{b0}, BitShare{b0 != (bv == 1)}};
                    auto out = gmw::mux_select(b, sl, sr, ptrs(cs), ch);
                    REQUIRE(reconstruct(out).to_u64() == (bv ? l : r));
                    ++rounds;
                    REQUIRE(ch.transcript().rounds(Phase::Online) == rounds);
                }
    }
}

TEST_CASE("shared prf evaluation") {
    Rng rng(8);
    const PrfInstance& f = prf_registry("toy16");
    SECTION("matches the plaintext oracle") {
        auto cs = fresh_triples(uint64_t(f.and_count()) * 100);
        Channel ch;
        for (int i = 0; i < 100; ++i) {
            BitVec key = BitVec::random(rng, 16);
            BitVec idx = BitVec::random(rng, 16);
            auto idx_sh = share_boolean(idx, rng);
            auto out = gmw::shared_prf_eval(f, Party::P0, key, idx_sh, ptrs(cs), ch);
            REQUIRE(reconstruct(out) == f.eval(key, idx));
        }
    }
    SECTION("batch of 5 equals 5 single evaluations; same rounds as one") {
        auto cs = fresh_triples(uint64_t(f.and_count()) * 10);
        Channel ch;
        ch.set_phase(Phase::Online);
        BitVec key = BitVec::random(rng, 16);
        std::vector<Pair<WordShare>> idx;
        std::vector<BitVec> clear;
        for (int j = 0; j < 5; ++j) {
            clear.push_back(BitVec::random(rng, 16));
            idx.push_back(share_boolean(clear.back(), rng));
        }
        auto out = gmw::shared_prf_eval_batch(f, Party::P0, key, idx, ptrs(cs), ch);
        for (int j = 0; j < 5; ++j)
            REQUIRE(reconstruct(Pair<WordShare>{out[0][j], out[1][j]}) == f.eval(key, clear[j]));
        CHECK(ch.transcript().rounds(Phase::Online) == f.r_f());
    }
}

TEST_CASE("open and reveal_to") {
    Rng rng(9);
    Channel ch;
    ch.set_phase(Phase::Online);
    BitVec v = BitVec::random(rng, 32);
    auto s = share_boolean(v, rng);
    CHECK(gmw::open(s, ch) == v);
    CHECK(ch.transcript().rounds(Phase::Online) == 1);
    CHECK(gmw::reveal_to(Party::P1, s, ch) == v);
    // open sent one 4-byte share each way; reveal_to only P0 -> P1
    CHECK(ch.transcript().bytes(Party::P1, Phase::Online) == 4 + 4);
    CHECK(ch.transcript().bytes(Party::P0, Phase::Online) == 2 * (4 + 4));
}
