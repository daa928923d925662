// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "hevf/common.hpp"

namespace hevf {

// Word-sized prime modulus with a precomputed Barrett ratio
// (floor(2^128 / value), two 64-bit words). Values stay below 2^62 so that
// products fit in unsigned __int128.
struct Modulus {
    uint64_t value = 0;
    uint32_t bit_size = 0;
    uint64_t const_ratio[2] = {0, 0};

    Modulus() = default;
    explicit Modulus(uint64_t v);

    bool operator==(const Modulus& o) const { return value == o.value; }
    bool operator!=(const Modulus& o) const { return value != o.value; }
};

inline uint64_t add_mod(uint64_t a, uint64_t b, uint64_t q) {
    uint64_t s = a + b;
    return s >= q ? s - q : s;
}

inline uint64_t sub_mod(uint64_t a, uint64_t b, uint64_t q) {
    return a >= b ? a - b : a + q - b;
}

inline uint64_t neg_mod(uint64_t a, uint64_t q) { return a == 0 ? 0 : q - a; }

// Barrett reduction of a 128-bit product.
inline uint64_t barrett_reduce_128(unsigned __int128 z, const Modulus& m) {
    uint64_t zlo = static_cast<uint64_t>(z);
    uint64_t zhi = static_cast<uint64_t>(z >> 64);
    // q_hat = floor(z * const_ratio / 2^128), top word only.
    unsigned __int128 t0 = (unsigned __int128)zlo * m.const_ratio[0];
    unsigned __int128 t1 = (unsigned __int128)zlo * m.const_ratio[1];
    unsigned __int128 t2 = (unsigned __int128)zhi * m.const_ratio[0];
    unsigned __int128 t3 = (unsigned __int128)zhi * m.const_ratio[1];
    unsigned __int128 mid = (t0 >> 64) + (uint64_t)t1 + (uint64_t)t2;
    uint64_t qhat = (uint64_t)(t3 + (t1 >> 64) + (t2 >> 64) + (mid >> 64));
    uint64_t r = zlo - qhat * m.value;
    while (r >= m.value) r -= m.value;
    return r;
}

inline uint64_t mul_mod(uint64_t a, uint64_t b, const Modulus& m) {
    return barrett_reduce_128((unsigned __int128)a * b, m);
}

// Barrett reduction of a single word (v may be up to 2^64-1).
inline uint64_t reduce_64(uint64_t v, const Modulus& m) {
    if (v < m.value) return v;
    return barrett_reduce_128(v, m);
}

// Shoup multiplication: b and b_shoup = floor(b * 2^64 / q) precomputed.
inline uint64_t mul_mod_shoup(uint64_t a, uint64_t b, uint64_t b_shoup, uint64_t q) {
    uint64_t hi = static_cast<uint64_t>(((unsigned __int128)a * b_shoup) >> 64);
    uint64_t r = a * b - hi * q;
    return r >= q ? r - q : r;
}

inline uint64_t shoup_precompute(uint64_t b, uint64_t q) {
    return static_cast<uint64_t>(((unsigned __int128)b << 64) / q);
}

uint64_t pow_mod(uint64_t base, uint64_t exp, const Modulus& m);
uint64_t inv_mod(uint64_t a, const Modulus& m);
bool is_prime(uint64_t n);

// Smallest-index deterministic search: for each requested bit size, the
// largest prime p < 2^bits with p = 1 (mod 2N), skipping primes already
// taken. Deterministic given (degree, bit_sizes).
std::vector<Modulus> generate_ntt_primes(uint32_t degree, const std::vector<uint32_t>& bit_sizes);

}  // namespace hevf
