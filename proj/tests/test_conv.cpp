#include <catch2/catch_amalgamated.hpp>

#include "pdte/conv.hpp"
#include "pdte/dealer.hpp"

using namespace pdte;

namespace {

Pair<CorrelationStore*> ptrs(Pair<CorrelationStore>& cs) { return {&cs[0], &cs[1]}; }

Pair<CorrelationStore> with_b2a(const mpz_class& n, uint64_t count, uint64_t seed) {
    Rng rng(seed);
    Pair<CorrelationStore> cs;
    dealer::gen_b2a_bits(n, count, rng, cs);
    return cs;
}

}  // namespace

TEST_CASE("b2a basics") {
    Rng rng(1);
    SECTION("zero maps to shares summing to zero") {
        mpz_class n = 23;
        auto cs = with_b2a(n, 8, 10);
        Channel ch;
        auto x = share_boolean(BitVec::from_u64(0, 8), rng);
        auto out = conv::b2a(x, n, ptrs(cs), ch);
        CHECK(reconstruct(out) == 0);
    }
    SECTION("ell=4, x=13, n=10 reconstructs 3") {
        mpz_class n = 10;
        auto cs = with_b2a(n, 4, 11);
        Channel ch;
        auto x = share_boolean(BitVec::from_u64(13, 4), rng);
        CHECK(reconstruct(conv::b2a(x, n, ptrs(cs), ch)) == 3);
    }
    SECTION("exactly one online round") {
        mpz_class n = 97;
        auto cs = with_b2a(n, 16, 12);
        Channel ch;
        ch.set_phase(Phase::Online);
        auto x = share_boolean(BitVec::from_u64(12345, 16), rng);
        CHECK(reconstruct(conv::b2a(x, n, ptrs(cs), ch)) == 12345 % 97);
        CHECK(ch.transcript().rounds(Phase::Online) == 1);
    }
    SECTION("correlation exhaustion") {
        mpz_class n = 10;
        auto cs = with_b2a(n, 3, 13);
        Channel ch;
        auto x = share_boolean(BitVec::from_u64(13, 4), rng);
        CHECK_THROWS_AS(conv::b2a(x, n, ptrs(cs), ch), CorrelationExhausted);
    }
}

TEST_CASE("b2a randomized against the big-integer oracle") {
    Rng rng(2);
    std::vector<mpz_class> moduli{mpz_class(23), pow2(64)};
    {
        Rng krng(3);
        paillier::Keypair kp = paillier::Keypair::generate(512, krng);
        moduli.push_back(kp.pk().n2);
    }
    for (const mpz_class& n : moduli) {
        uint32_t width = std::min<uint32_t>(residue_bits(n) + 2, 80);
        int iters = n > pow2(64) ? 20 : 200;
        auto cs = with_b2a(n, uint64_t(width) * iters, 14);
        Channel ch;
        for (int i = 0; i < iters; ++i) {
            BitVec x = BitVec::random(rng, width);
            auto sh = share_boolean(x, rng);
            auto out = conv::b2a(sh, n, ptrs(cs), ch);
            REQUIRE(reconstruct(out) == mod(bits_to_mpz(x), n));
        }
    }
}

TEST_CASE("a2b basics") {
    Rng rng(4);
    SECTION("zero maps to boolean zero") {
        mpz_class n = pow2(8);
        auto x = share_arith(0, n, rng);
        Rng drng(15);
        Pair<CorrelationStore> cs;
        dealer::gen_boolean_triples(4000, drng, cs);
        Channel ch;
        CHECK(reconstruct(conv::a2b(x, ptrs(cs), ch)).to_u64() == 0);
    }
    SECTION("shares (200, 100) mod 256 give boolean 44") {
        mpz_class n = pow2(8);
        Pair<ArithShare> x{ArithShare(200, n), ArithShare(100, n)};
        Rng drng(16);
        Pair<CorrelationStore> cs;
        dealer::gen_boolean_triples(4000, drng, cs);
        Channel ch;
        CHECK(reconstruct(conv::a2b(x, ptrs(cs), ch)).to_u64() == 44);
    }
    SECTION("non-power-of-two modulus is rejected") {
        Pair<ArithShare> x{ArithShare(1, mpz_class(10)), ArithShare(2, mpz_class(10))};
        Pair<CorrelationStore> cs;
        Channel ch;
        CHECK_THROWS_AS(conv::a2b(x, ptrs(cs), ch), ConfigInvalid);
    }
    SECTION("round bound: rounds <= 2*ceil(log2 w) + 1") {
        for (uint32_t w : {8u, 16u, 64u}) {
            mpz_class n = pow2(w);
            Rng drng(17);
            Pair<CorrelationStore> cs;
            dealer::gen_boolean_triples(20000, drng, cs);
            Channel ch;
            ch.set_phase(Phase::Online);
            auto x = share_arith(rng.mpz_below(n), n, rng);
            conv::a2b(x, ptrs(cs), ch);
            uint32_t lg = index_bits(w);
            CHECK(ch.transcript().rounds(Phase::Online) <= 2 * lg + 1);
        }
    }
}

TEST_CASE("b2a then a2b is the identity on 16-bit values") {
    Rng rng(5);
    mpz_class n = pow2(16);
    auto cs = with_b2a(n, 16 * 1000, 18);
    Rng drng(19);
    dealer::gen_boolean_triples(1'200'000, drng, cs);
    Channel ch;
    for (int i = 0; i < 1000; ++i) {
        BitVec x = BitVec::random(rng, 16);
        auto sh = share_boolean(x, rng);
        auto arith = conv::b2a(sh, n, ptrs(cs), ch);
        auto back = conv::a2b(arith, ptrs(cs), ch);
        REQUIRE(reconstruct(back) == x);
    }
}

TEST_CASE("add_to_mult") {
    Rng rng(6);
    SECTION("x=1 with forced gamma=1 gives shares (1,1)") {
        paillier::Keypair kp = paillier::Keypair::from_primes(251, 241);
        mpz_class n2 = kp.pk().n2;
        Rng drng(20);
        Pair<CorrelationStore> cs;
        dealer::gen_special_bmt(n2, 1, Party::P0, drng, cs);
        Channel ch;
        Pair<ArithShare> x = share_arith(1, n2, rng);
        mpz_class one = 1;
        conv::A2mOptions opt;
        opt.forced_gamma = &one;
        auto m = conv::add_to_mult(x, kp.pk().n, ptrs(cs), ch, rng, opt);
        CHECK(m[0].value == 1);
        CHECK(m[1].value == 1);
        CHECK(reconstruct(m) == 1);
    }
    SECTION("16-bit test primes, 1000 random instances") {
        paillier::Keypair kp = paillier::Keypair::from_primes(65521, 65537);
        mpz_class n2 = kp.pk().n2;
        Rng drng(21);
        Pair<CorrelationStore> cs;
        dealer::gen_special_bmt(n2, 1000, Party::P0, drng, cs);
        Channel ch;
        ch.set_phase(Phase::Online);
        uint64_t rounds = 0;
        for (int i = 0; i < 1000; ++i) {
            mpz_class v = rng.mpz_below(n2);
            auto x = share_arith(v, n2, rng);
            auto m = conv::add_to_mult(x, kp.pk().n, ptrs(cs), ch, rng);
            REQUIRE(reconstruct(m) == v);
            rounds += 2;  // e/f exchange shares a flush; final message is second
            REQUIRE(ch.transcript().rounds(Phase::Online) == rounds);
        }
    }
    SECTION("cross-term identity a*f + e*f + b*e + c = gamma^-1 * x_r") {
        paillier::Keypair kp = paillier::Keypair::from_primes(65521, 65537);
        mpz_class n2 = kp.pk().n2;
        Rng drng(22);
        for (int i = 0; i < 200; ++i) {
            mpz_class a = drng.mpz_below(n2), b = drng.mpz_below(n2);
            mpz_class c = mulmod(a, b, n2);
            mpz_class gamma;
            do { gamma = drng.mpz_below(n2); } while (gcd(gamma, kp.pk().n) != 1);
            mpz_class gi = invmod(gamma, n2);
            mpz_class xr = drng.mpz_below(n2);
            mpz_class e = mod(gi - a, n2), f = mod(xr - b, n2);
            REQUIRE(mod(a * f + e * f + b * e + c, n2) == mulmod(gi, xr, n2));
        }
    }
    SECTION("forced non-invertible gamma is rejected") {
        paillier::Keypair kp = paillier::Keypair::from_primes(251, 241);
        mpz_class n2 = kp.pk().n2;
        Rng drng(23);
        Pair<CorrelationStore> cs;
        dealer::gen_special_bmt(n2, 1, Party::P0, drng, cs);
        Channel ch;
        Pair<ArithShare> x = share_arith(5, n2, rng);
        mpz_class bad = 251;  // divides N
        conv::A2mOptions opt;
        opt.forced_gamma = &bad;
        CHECK_THROWS_AS(conv::add_to_mult(x, kp.pk().n, ptrs(cs), ch, rng, opt), ProtocolError);
    }
    SECTION("wrong-modulus shares are rejected") {
        paillier::Keypair kp = paillier::Keypair::from_primes(251, 241);
        Pair<CorrelationStore> cs;
        Channel ch;
        Pair<ArithShare> x = share_arith(5, mpz_class(99), rng);
        CHECK_THROWS_AS(conv::add_to_mult(x, kp.pk().n, ptrs(cs), ch, rng), ModulusMismatch);
    }
}
