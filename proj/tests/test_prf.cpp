#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pdte/prf.hpp"
#include "pdte/sharing.hpp"

using namespace pdte;

TEST_CASE("prf is deterministic") {
    const PrfInstance& f = prf_registry("toy16");
    Rng rng(1);
    BitVec key = BitVec::random(rng, 16);
    BitVec in = BitVec::random(rng, 16);
    CHECK(f.eval(key, in) == f.eval(key, in));
}

TEST_CASE("prf widths are enforced") {
    const PrfInstance& f = prf_registry("toy16");
    CHECK_THROWS_AS(f.eval(BitVec(8), BitVec(16)), WidthMismatch);
    CHECK_THROWS_AS(f.eval(BitVec(16), BitVec(8)), WidthMismatch);
}

TEST_CASE("collision rate under one key stays near the birthday bound") {
    const PrfInstance& f = prf_registry("toy16");
    Rng rng(2);
    BitVec key = BitVec::random(rng, 16);
    std::set<uint64_t> seen;
    int collisions = 0;
    const int samples = 10000;
    std::set<uint64_t> used_inputs;
    for (int i = 0; i < samples; ++i) {
        uint64_t x;
        do { x = rng.below(65536); } while (!used_inputs.insert(x).second);
        uint64_t y = f.eval(key, BitVec::from_u64(x, 16)).to_u64();
        if (!seen.insert(y).second) ++collisions;
    }
    // at most the birthday rate (~samples^2 / 2^17 ~ 760 for a random
    // function; the SPN with input width == block width is a permutation and
    // gives zero)
    CHECK(collisions < 1600);
    CHECK(seen.size() + size_t(collisions) == size_t(samples));
}

TEST_CASE("circuit evaluation matches plaintext evaluation") {
    SECTION("exhaustive on the 8-bit toy set") {
        const PrfInstance& f = prf_registry("toy8");
        const Circuit& c = f.circuit();
        Rng rng(3);
        for (int k = 0; k < 4; ++k) {
            BitVec key = BitVec::random(rng, 8);
            for (uint64_t x = 0; x < 256; ++x) {
                BitVec in = BitVec::from_u64(x, 8);
                REQUIRE(c.eval_plain(key, in) == f.eval(key, in));
            }
        }
    }
    SECTION("randomized on the full-size set") {
        const PrfInstance& f = prf_registry("lowmc128");
        const Circuit& c = f.circuit();
        Rng rng(4);
        for (int i = 0; i < 20; ++i) {
            BitVec key = BitVec::random(rng, 128);
            BitVec in = BitVec::random(rng, 128);
            REQUIRE(c.eval_plain(key, in) == f.eval(key, in));
        }
    }
}

TEST_CASE("circuit cost metrics are stable and as constructed") {
    const PrfInstance& f = prf_registry("toy16");
    CHECK(f.circuit().and_count == f.and_count());
    CHECK(f.and_count() == 3 * 5 * 4);
    CHECK(f.circuit().and_depth == f.r_f());
    CHECK(f.r_f() == 4);
    const PrfInstance& g = prf_registry("lowmc128");
    CHECK(g.circuit().and_count == 3u * 42 * 14);
    CHECK(g.circuit().and_depth == 14);
}

TEST_CASE("index_concat") {
    Rng rng(5);
    SECTION("B=1 is the identity") {
        auto i = share_boolean(BitVec::from_u64(5, 8), rng);
        auto out = index_concat(i, 0, 1, 8);
        CHECK(reconstruct(out).to_u64() == 5);
    }
    SECTION("ell=8, i=3, B=4, j=2 reconstructs 14") {
        auto i = share_boolean(BitVec::from_u64(3, 6), rng);
        auto out = index_concat(i, 2, 4, 8);
        CHECK(reconstruct(out).to_u64() == 3 * 4 + 2);
    }
    SECTION("width guard: 7 + 2 > 8") {
        auto i = share_boolean(BitVec::from_u64(0, 7), rng);
        CHECK_THROWS_AS(index_concat(i, 2, 4, 8), IndexWidthOverflow);
    }
    SECTION("injective over the valid domain") {
        std::set<uint64_t> seen;
        for (uint64_t i = 0; i < 32; ++i)
            for (uint64_t j = 0; j < 4; ++j) {
                auto is = share_boolean(BitVec::from_u64(i, 5), rng);
                uint64_t v = reconstruct(index_concat(is, j, 4, 8)).to_u64();
                CHECK(seen.insert(v).second);
            }
    }
}

TEST_CASE("unknown parameter set is rejected") {
    CHECK_THROWS_AS(prf_registry("nope"), ConfigInvalid);
}
