#pragma once

#include "pdte/bigint.hpp"
#include "pdte/common.hpp"
#include "pdte/rng.hpp"

namespace pdte {
namespace paillier {

struct PublicKey {
    mpz_class n;
    mpz_class n2;

    bool operator==(const PublicKey& o) const { return n == o.n; }
    size_t ciphertext_bytes() const { return residue_wire_bytes(n2); }
};

struct Ciphertext {
    mpz_class value;  // residue in Z*_{N^2}
    mpz_class n2;

    Bytes to_wire(const PublicKey& pk) const { return mpz_to_be(value, pk.ciphertext_bytes()); }
};

// Keypair with the phi(N) decryption constants of the textbook scheme plus
// CRT constants for the fast path (equivalence of the two is a unit test).
class Keypair {
public:
    static Keypair generate(uint32_t n_bits, Rng& rng) {
        if (n_bits < 16) throw ConfigInvalid("paillier: |N| must be >= 16");
        while (true) {
            mpz_class p = random_prime(n_bits / 2, rng);
            mpz_class q = random_prime(n_bits - n_bits / 2, rng);
            if (p == q) continue;
            Keypair kp(p, q);
            if (bit_length(kp.pk().n) != n_bits) continue;
            if (gcd(kp.pk().n, kp.phi_) != 1) continue;
            return kp;
        }
    }

    // Test constructor from fixed primes (e.g. p=5, q=7).
    static Keypair from_primes(const mpz_class& p, const mpz_class& q) { return Keypair(p, q); }

    const PublicKey& pk() const { return pk_; }
    const mpz_class& p() const { return p_; }
    const mpz_class& q() const { return q_; }
    const mpz_class& phi() const { return phi_; }
    const mpz_class& phi_inv() const { return phi_inv_; }

    // x := ((c^phi mod N^2) - 1)/N * phi^-1 mod N
    mpz_class decrypt(const Ciphertext& c) const {
        check(c);
        mpz_class u = powmod(c.value, phi_, pk_.n2);
        mpz_class l = (u - 1) / pk_.n;
        return mulmod(l, phi_inv_, pk_.n);
    }

    // CRT fast path; bit-identical output to decrypt().
    mpz_class decrypt_crt(const Ciphertext& c) const {
        check(c);
        mpz_class mp = mulmod((powmod(c.value, p_ - 1, p2_) - 1) / p_, hp_, p_);
        mpz_class mq = mulmod((powmod(c.value, q_ - 1, q2_) - 1) / q_, hq_, q_);
        // Garner combine: m = mp + p * ((mq - mp) * p^-1 mod q)
        mpz_class t = mod((mq - mp) * p_inv_q_, q_);
        return mp + p_ * t;
    }

private:
    Keypair(const mpz_class& p, const mpz_class& q) : p_(p), q_(q) {
        pk_.n = p * q;
        pk_.n2 = pk_.n * pk_.n;
        phi_ = (p - 1) * (q - 1);
        phi_inv_ = invmod(phi_, pk_.n);
        p2_ = p * p;
        q2_ = q * q;
        // h_p = (L_p((1+N)^{p-1} mod p^2))^-1 mod p; (1+N)^{p-1} = 1+(p-1)N mod p^2
        hp_ = invmod(mod((p_ - 1) * (pk_.n / p_), p_), p_);
        hq_ = invmod(mod((q_ - 1) * (pk_.n / q_), q_), q_);
        p_inv_q_ = invmod(p_, q_);
    }

    void check(const Ciphertext& c) const {
        if (c.n2 != pk_.n2) throw KeyMismatch("ciphertext under different key");
    }

    static mpz_class random_prime(uint32_t bits, Rng& rng) {
        while (true) {
            mpz_class cand = rng.mpz_bits(bits);
            // force full width so N lands on the requested size
            mpz_setbit(cand.get_mpz_t(), bits - 1);
            if (bits >= 3) mpz_setbit(cand.get_mpz_t(), bits - 2);
            mpz_class p;
            mpz_nextprime(p.get_mpz_t(), cand.get_mpz_t());
            if (bit_length(p) == bits) return p;
        }
    }

    PublicKey pk_;
    mpz_class p_, q_, phi_, phi_inv_;
    mpz_class p2_, q2_, hp_, hq_, p_inv_q_;
};

// c := (1+N)^x * r^N mod N^2, with (1+N)^x expanded to 1 + xN (exact mod N^2).
inline Ciphertext encrypt_with_r(const PublicKey& pk, const mpz_class& x, const mpz_class& r) {
    if (x < 0 || x >= pk.n) throw PlaintextOutOfRange("paillier plaintext not in [0, N)");
    if (gcd(r, pk.n) != 1) throw ConfigInvalid("paillier: r not in Z*_N");
    mpz_class gx = mod(1 + x * pk.n, pk.n2);
    mpz_class rn = powmod(r, pk.n, pk.n2);
    return Ciphertext{mulmod(gx, rn, pk.n2), pk.n2};
}

inline Ciphertext encrypt(const PublicKey& pk, const mpz_class& x, Rng& rng) {
    mpz_class r;
    do { r = rng.mpz_below(pk.n); } while (r == 0 || gcd(r, pk.n) != 1);
    return encrypt_with_r(pk, x, r);
}

inline Ciphertext hom_add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
    if (c1.n2 != pk.n2 || c2.n2 != pk.n2) throw KeyMismatch("hom_add: key mismatch");
    return Ciphertext{mulmod(c1.value, c2.value, pk.n2), pk.n2};
}

inline Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c, const mpz_class& a) {
    if (c.n2 != pk.n2) throw KeyMismatch("hom_scale: key mismatch");
    return Ciphertext{powmod(c.value, mod(a, pk.n), pk.n2), pk.n2};
}

}  // namespace paillier
}  // namespace pdte
