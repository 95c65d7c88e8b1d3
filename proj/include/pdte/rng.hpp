#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "pdte/common.hpp"

namespace pdte {

// Deterministic, injectable randomness source. Every protocol run and every
// dealer batch is replayable from a 64-bit seed; this is a correctness and
// metering artifact, not a production DRBG.
//
// Word stream: xoshiro256** seeded via splitmix64. Big-integer stream: GMP's
// Mersenne Twister, seeded from the same master seed so the two streams stay
// in lockstep across runs.
class Rng {
public:
    explicit Rng(uint64_t seed) : gmp_(gmp_randinit_mt) {
        uint64_t x = seed;
        for (auto& si : s_) si = splitmix(x);
        gmp_.seed(static_cast<unsigned long>(seed ^ 0x9e3779b97f4a7c15ULL));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    bool next_bit() { return next_u64() & 1; }

    // Uniform in [0, bound), bound > 0.
    uint64_t below(uint64_t bound) {
        if (bound == 0) throw ConfigInvalid("rng.below: zero bound");
        if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % bound;
    }

    // Uniform residue in [0, n).
    mpz_class mpz_below(const mpz_class& n) {
        if (n <= 0) throw ConfigInvalid("rng.mpz_below: nonpositive modulus");
        return gmp_.get_z_range(n);
    }

    // Uniform k-bit integer (top bit not forced).
    mpz_class mpz_bits(uint32_t k) { return gmp_.get_z_bits(k); }

    void fill(uint8_t* out, size_t len) {
        size_t i = 0;
        while (i + 8 <= len) {
            uint64_t w = next_u64();
            for (int b = 0; b < 8; ++b) out[i++] = uint8_t(w >> (8 * b));
        }
        if (i < len) {
            uint64_t w = next_u64();
            for (; i < len; ++i, w >>= 8) out[i] = uint8_t(w);
        }
    }

    Bytes bytes(size_t len) {
        Bytes out(len);
        fill(out.data(), len);
        return out;
    }

    // Derive an independent substream (dealer uses one per correlation kind so
    // pool layouts stay stable as budgets change).
    Rng fork(uint64_t tag) {
        return Rng(next_u64() ^ (tag * 0x9e3779b97f4a7c15ULL));
    }

    static uint64_t splitmix(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Stable 64-bit hash for deriving parameter-set seeds from strings.
    static uint64_t hash_str(const std::string& s) {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
    gmp_randclass gmp_;
};

}  // namespace pdte
