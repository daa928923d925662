// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hevf/common.hpp"
#include "hevf/rns_poly.hpp"

namespace hevf {

// RLWE samplers. All deterministic under a fixed Rng state.
namespace sample {

inline RnsPoly ternary(uint32_t degree, const std::vector<Modulus>& moduli, Rng& rng) {
    RnsPoly p(degree, moduli, Form::coeff);
    for (uint32_t k = 0; k < degree; ++k) {
        uint64_t t = rng.u64_below(3);  // 0, 1, 2 -> 0, 1, -1
        for (size_t l = 0; l < p.limb_count(); ++l) {
            uint64_t q = p.modulus(l).value;
            p.limb(l)[k] = t == 0 ? 0 : (t == 1 ? 1 : q - 1);
        }
    }
    return p;
}

// Integer-rounded centered Gaussian, tails clipped at 6*sigma.
inline RnsPoly gaussian(uint32_t degree, const std::vector<Modulus>& moduli, double sigma, Rng& rng) {
    if (sigma <= 0.0) throw param_error("gaussian sampler: sigma must be positive");
    const double clip = 6.0 * sigma;
    RnsPoly p(degree, moduli, Form::coeff);
    for (uint32_t k = 0; k < degree; ++k) {
        double x = sigma * rng.gaussian();
        if (x > clip) x = clip;
        if (x < -clip) x = -clip;
        int64_t v = llround(x);
        for (size_t l = 0; l < p.limb_count(); ++l) {
            uint64_t q = p.modulus(l).value;
            p.limb(l)[k] = v >= 0 ? uint64_t(v) : q - uint64_t(-v);
        }
    }
    return p;
}

inline RnsPoly uniform(uint32_t degree, const std::vector<Modulus>& moduli, Rng& rng) {
    RnsPoly p(degree, moduli, Form::coeff);
    for (size_t l = 0; l < p.limb_count(); ++l) {
        uint64_t q = p.modulus(l).value;
        uint64_t* d = p.limb(l);
        for (uint32_t k = 0; k < degree; ++k) d[k] = rng.u64_below(q);
    }
    return p;
}

}  // namespace sample
}  // namespace hevf
