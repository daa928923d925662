// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hevf/rns_poly.hpp"

namespace hevf::ref {

// Serial reference kernels. Straight-line O(N^2) implementations kept as
// oracles for the NTT path and as the baseline side of the benchmark.

// Schoolbook negacyclic convolution of one limb: c = a*b mod (X^N+1, q).
inline void negacyclic_mul_limb(const uint64_t* a, const uint64_t* b, uint64_t* c, uint32_t n,
                                const Modulus& q) {
    for (uint32_t i = 0; i < n; ++i) c[i] = 0;
    for (uint32_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (uint32_t j = 0; j < n; ++j) {
            uint64_t p = mul_mod(a[i], b[j], q);
            uint32_t k = i + j;
            if (k < n) {
                c[k] = add_mod(c[k], p, q.value);
            } else {
                c[k - n] = sub_mod(c[k - n], p, q.value);
            }
        }
    }
}

inline RnsPoly ring_mul_schoolbook(const RnsPoly& a, const RnsPoly& b) {
    if (!a.same_shape(b)) throw param_error("schoolbook mul: mismatched shapes");
    if (a.form() != Form::coeff) throw param_error("schoolbook mul: coefficient form required");
    RnsPoly c(a.degree(), a.moduli(), Form::coeff);
    for (size_t l = 0; l < a.limb_count(); ++l)
        negacyclic_mul_limb(a.limb(l), b.limb(l), c.limb(l), a.degree(), a.modulus(l));
    return c;
}

}  // namespace hevf::ref
