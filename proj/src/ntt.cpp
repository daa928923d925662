// SPDX-License-Identifier: Apache-2.0
#include "hevf/ntt.hpp"

namespace hevf {

namespace {

uint32_t log2_exact(uint32_t n) {
    uint32_t l = 0;
    while ((uint32_t(1) << l) < n) ++l;
    return l;
}

uint32_t reverse_bits(uint32_t v, uint32_t bits) {
    uint32_t r = 0;
    for (uint32_t i = 0; i < bits; ++i) {
        r = (r << 1) | (v & 1);
        v >>= 1;
    }
    return r;
}

// Deterministic primitive 2n-th root of unity: smallest base h whose
// (q-1)/2n power has order exactly 2n.
uint64_t find_primitive_root(uint32_t n, const Modulus& q) {
    if ((q.value - 1) % (uint64_t(n) * 2) != 0)
        throw param_error("modulus " + std::to_string(q.value) + " is not NTT-friendly for degree " +
                          std::to_string(n));
    uint64_t exp = (q.value - 1) / (uint64_t(n) * 2);
    for (uint64_t h = 2;; ++h) {
        uint64_t cand = pow_mod(h, exp, q);
        if (pow_mod(cand, n, q) == q.value - 1) return cand;
    }
}

}  // namespace

NttTables::NttTables(uint32_t degree, const Modulus& q) : q_(q), n_(degree), log_n_(log2_exact(degree)) {
    uint64_t psi = find_primitive_root(n_, q_);
    uint64_t psi_inv = inv_mod(psi, q_);

    root_powers_.resize(n_);
    inv_root_powers_.resize(n_);
    root_powers_sh_.resize(n_);
    inv_root_powers_sh_.resize(n_);

    std::vector<uint64_t> pow_fwd(n_), pow_inv(n_);
    pow_fwd[0] = 1;
    pow_inv[0] = 1;
    for (uint32_t i = 1; i < n_; ++i) {
        pow_fwd[i] = mul_mod(pow_fwd[i - 1], psi, q_);
        pow_inv[i] = mul_mod(pow_inv[i - 1], psi_inv, q_);
    }
    for (uint32_t i = 0; i < n_; ++i) {
        uint32_t r = reverse_bits(i, log_n_);
        root_powers_[i] = pow_fwd[r];
        inv_root_powers_[i] = pow_inv[r];
        root_powers_sh_[i] = shoup_precompute(root_powers_[i], q_.value);
        inv_root_powers_sh_[i] = shoup_precompute(inv_root_powers_[i], q_.value);
    }
    inv_n_ = inv_mod(n_, q_);
    inv_n_sh_ = shoup_precompute(inv_n_, q_.value);
}

void NttTables::forward(uint64_t* a) const {
    const uint64_t q = q_.value;
    uint32_t t = n_;
    for (uint32_t m = 1; m < n_; m <<= 1) {
        t >>= 1;
        for (uint32_t i = 0; i < m; ++i) {
            uint64_t s = root_powers_[m + i];
            uint64_t s_sh = root_powers_sh_[m + i];
            uint64_t* x = a + 2 * i * t;
            uint64_t* y = x + t;
            for (uint32_t j = 0; j < t; ++j) {
                uint64_t u = x[j];
                uint64_t v = mul_mod_shoup(y[j], s, s_sh, q);
                x[j] = add_mod(u, v, q);
                y[j] = sub_mod(u, v, q);
            }
        }
    }
}

void NttTables::inverse(uint64_t* a) const {
    const uint64_t q = q_.value;
    for (uint32_t m = n_ >> 1; m >= 1; m >>= 1) {
        uint32_t t = n_ / (2 * m);
        for (uint32_t i = 0; i < m; ++i) {
            uint64_t s = inv_root_powers_[m + i];
            uint64_t s_sh = inv_root_powers_sh_[m + i];
            uint64_t* x = a + 2 * i * t;
            uint64_t* y = x + t;
            for (uint32_t j = 0; j < t; ++j) {
                uint64_t u = x[j];
                uint64_t v = y[j];
                x[j] = add_mod(u, v, q);
                y[j] = mul_mod_shoup(sub_mod(u, v, q), s, s_sh, q);
            }
        }
    }
    for (uint32_t j = 0; j < n_; ++j) a[j] = mul_mod_shoup(a[j], inv_n_, inv_n_sh_, q);
}

}  // namespace hevf
