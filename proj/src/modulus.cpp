// SPDX-License-Identifier: Apache-2.0
#include "hevf/modulus.hpp"

#include <algorithm>

namespace hevf {

namespace {

uint32_t bit_length(uint64_t v) {
    uint32_t n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

// floor(2^128 / q) computed by 128-bit schoolbook division.
void compute_const_ratio(uint64_t q, uint64_t out[2]) {
    unsigned __int128 rem = 0;
    uint64_t words[2] = {0, 0};
    // Divide the 256-bit value 2^128 by q, two 64-bit digits of quotient.
    // 2^128 = hi:lo words (1,0,0) in base 2^64 above the two output digits.
    rem = 1;  // leading word
    for (int i = 1; i >= 0; --i) {
        unsigned __int128 cur = (rem << 64);
        words[i] = static_cast<uint64_t>(cur / q);
        rem = cur % q;
    }
    out[0] = words[0];
    out[1] = words[1];
}

uint64_t mul_mod_slow(uint64_t a, uint64_t b, uint64_t q) {
    return static_cast<uint64_t>((unsigned __int128)a * b % q);
}

uint64_t pow_mod_slow(uint64_t base, uint64_t exp, uint64_t q) {
    uint64_t r = 1;
    base %= q;
    while (exp) {
        if (exp & 1) r = mul_mod_slow(r, base, q);
        base = mul_mod_slow(base, base, q);
        exp >>= 1;
    }
    return r;
}

}  // namespace

Modulus::Modulus(uint64_t v) : value(v), bit_size(bit_length(v)) {
    if (v < 2 || v >= (uint64_t(1) << 62)) throw param_error("modulus out of range (need 2 <= q < 2^62)");
    compute_const_ratio(v, const_ratio);
}

uint64_t pow_mod(uint64_t base, uint64_t exp, const Modulus& m) {
    uint64_t r = 1;
    base = reduce_64(base, m);
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

uint64_t inv_mod(uint64_t a, const Modulus& m) {
    if (a == 0) throw param_error("inverse of zero");
    return pow_mod(a, m.value - 2, m);  // m.value prime
}

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = pow_mod_slow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mul_mod_slow(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<Modulus> generate_ntt_primes(uint32_t degree, const std::vector<uint32_t>& bit_sizes) {
    if (degree < 2 || (degree & (degree - 1)) != 0) throw param_error("degree must be a power of two >= 2");
    uint64_t two_n = uint64_t(degree) * 2;
    std::vector<Modulus> out;
    std::vector<uint64_t> taken;
    for (uint32_t bits : bit_sizes) {
        if (bits < 20 || bits > 61) throw param_error("prime bit size must be in [20, 61]");
        uint64_t top = uint64_t(1) << bits;
        // Largest candidate below 2^bits congruent to 1 mod 2N.
        uint64_t p = ((top - 2) / two_n) * two_n + 1;
        bool found = false;
        while (p > (uint64_t(1) << (bits - 1))) {
            if (is_prime(p) && std::find(taken.begin(), taken.end(), p) == taken.end()) {
                found = true;
                break;
            }
            p -= two_n;
        }
        if (!found) throw param_error("no NTT-friendly prime of requested size");
        taken.push_back(p);
        out.emplace_back(p);
    }
    return out;
}

}  // namespace hevf
