// SPDX-License-Identifier: Apache-2.0
#include "hevf/rns_poly.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hevf {
namespace ring {

void check_compatible(const RnsPoly& a, const RnsPoly& b) {
    if (!a.same_shape(b)) throw param_error("ring op on polynomials with mismatched degree/limb sets");
    if (a.form() != b.form()) throw param_error("ring op on polynomials in different forms");
}

void add_inplace(RnsPoly& a, const RnsPoly& b) {
    check_compatible(a, b);
    const uint32_t n = a.degree();
    for (size_t l = 0; l < a.limb_count(); ++l) {
        const uint64_t q = a.modulus(l).value;
        uint64_t* pa = a.limb(l);
        const uint64_t* pb = b.limb(l);
        for (uint32_t i = 0; i < n; ++i) pa[i] = add_mod(pa[i], pb[i], q);
    }
}

void sub_inplace(RnsPoly& a, const RnsPoly& b) {
    check_compatible(a, b);
    const uint32_t n = a.degree();
    for (size_t l = 0; l < a.limb_count(); ++l) {
        const uint64_t q = a.modulus(l).value;
        uint64_t* pa = a.limb(l);
        const uint64_t* pb = b.limb(l);
        for (uint32_t i = 0; i < n; ++i) pa[i] = sub_mod(pa[i], pb[i], q);
    }
}

void negate_inplace(RnsPoly& a) {
    const uint32_t n = a.degree();
    for (size_t l = 0; l < a.limb_count(); ++l) {
        const uint64_t q = a.modulus(l).value;
        uint64_t* pa = a.limb(l);
        for (uint32_t i = 0; i < n; ++i) pa[i] = neg_mod(pa[i], q);
    }
}

RnsPoly add(const RnsPoly& a, const RnsPoly& b) {
    RnsPoly r = a;
    add_inplace(r, b);
    return r;
}

RnsPoly sub(const RnsPoly& a, const RnsPoly& b) {
    RnsPoly r = a;
    sub_inplace(r, b);
    return r;
}

void ntt_forward_inplace(RnsPoly& p, const TableCache& tables) {
    if (p.form() != Form::coeff) throw param_error("ntt_forward: input already in NTT form");
    const int limbs = static_cast<int>(p.limb_count());
#pragma omp parallel for schedule(static) if (limbs > 1)
    for (int l = 0; l < limbs; ++l) tables.get(p.modulus(l)).forward(p.limb(l));
    p.set_form(Form::ntt);
}

void ntt_inverse_inplace(RnsPoly& p, const TableCache& tables) {
    if (p.form() != Form::ntt) throw param_error("ntt_inverse: input not in NTT form");
    const int limbs = static_cast<int>(p.limb_count());
#pragma omp parallel for schedule(static) if (limbs > 1)
    for (int l = 0; l < limbs; ++l) tables.get(p.modulus(l)).inverse(p.limb(l));
    p.set_form(Form::coeff);
}

RnsPoly ntt_forward(const RnsPoly& p, const TableCache& tables) {
    RnsPoly r = p;
    ntt_forward_inplace(r, tables);
    return r;
}

RnsPoly ntt_inverse(const RnsPoly& p, const TableCache& tables) {
    RnsPoly r = p;
    ntt_inverse_inplace(r, tables);
    return r;
}

void mul_pointwise_inplace(RnsPoly& a, const RnsPoly& b) {
    check_compatible(a, b);
    if (a.form() != Form::ntt) throw param_error("pointwise product requires NTT form");
    const uint32_t n = a.degree();
    for (size_t l = 0; l < a.limb_count(); ++l) {
        const Modulus& q = a.modulus(l);
        uint64_t* pa = a.limb(l);
        const uint64_t* pb = b.limb(l);
        for (uint32_t i = 0; i < n; ++i) pa[i] = mul_mod(pa[i], pb[i], q);
    }
}

RnsPoly mul_pointwise(const RnsPoly& a, const RnsPoly& b) {
    RnsPoly r = a;
    mul_pointwise_inplace(r, b);
    return r;
}

void mul_acc_pointwise(RnsPoly& a, const RnsPoly& b, const RnsPoly& c) {
    check_compatible(b, c);
    check_compatible(a, b);
    const uint32_t n = a.degree();
    for (size_t l = 0; l < a.limb_count(); ++l) {
        const Modulus& q = a.modulus(l);
        uint64_t* pa = a.limb(l);
        const uint64_t* pb = b.limb(l);
        const uint64_t* pc = c.limb(l);
        for (uint32_t i = 0; i < n; ++i) pa[i] = add_mod(pa[i], mul_mod(pb[i], pc[i], q), q.value);
    }
}

void mul_scalar_limb_inplace(RnsPoly& a, size_t limb, uint64_t scalar) {
    const Modulus& q = a.modulus(limb);
    uint64_t s = reduce_64(scalar, q);
    uint64_t s_sh = shoup_precompute(s, q.value);
    uint64_t* pa = a.limb(limb);
    for (uint32_t i = 0; i < a.degree(); ++i) pa[i] = mul_mod_shoup(pa[i], s, s_sh, q.value);
}

void mul_scalar_inplace(RnsPoly& a, const std::vector<uint64_t>& scalar_per_limb) {
    for (size_t l = 0; l < a.limb_count(); ++l) mul_scalar_limb_inplace(a, l, scalar_per_limb[l]);
}

RnsPoly ring_mul(const RnsPoly& a, const RnsPoly& b, const TableCache& tables) {
    if (!a.same_shape(b)) throw param_error("ring_mul: mismatched limb sets");
    RnsPoly fa = a.form() == Form::ntt ? a : ntt_forward(a, tables);
    RnsPoly fb = b.form() == Form::ntt ? b : ntt_forward(b, tables);
    mul_pointwise_inplace(fa, fb);
    if (a.form() == Form::coeff) ntt_inverse_inplace(fa, tables);
    return fa;
}

RnsPoly drop_last_limb(const RnsPoly& p) {
    if (p.form() != Form::coeff) throw param_error("drop_last_limb requires coefficient form");
    if (p.limb_count() < 2) throw param_error("drop_last_limb: level exhausted (single limb)");
    const size_t last = p.limb_count() - 1;
    const Modulus& ql = p.modulus(last);
    const uint64_t half = ql.value >> 1;
    RnsPoly out(p.degree(), std::vector<Modulus>(p.moduli().begin(), p.moduli().end() - 1), Form::coeff);
    for (size_t l = 0; l < last; ++l) {
        const Modulus& qi = p.modulus(l);
        const uint64_t inv_ql = inv_mod(reduce_64(ql.value, qi), qi);
        const uint64_t inv_ql_sh = shoup_precompute(inv_ql, qi.value);
        const uint64_t ql_mod_qi = reduce_64(ql.value, qi);
        const uint64_t* src = p.limb(l);
        const uint64_t* lastv = p.limb(last);
        uint64_t* dst = out.limb(l);
        for (uint32_t k = 0; k < p.degree(); ++k) {
            // Centered representative of the dropped residue gives
            // divide-and-round rather than floor.
            uint64_t c = reduce_64(lastv[k], qi);
            if (lastv[k] > half) c = sub_mod(c, ql_mod_qi, qi.value);
            uint64_t t = sub_mod(src[k], c, qi.value);
            dst[k] = mul_mod_shoup(t, inv_ql, inv_ql_sh, qi.value);
        }
    }
    return out;
}

RnsPoly apply_automorphism(const RnsPoly& p, uint64_t galois_exp) {
    if (p.form() != Form::coeff) throw param_error("automorphism requires coefficient form");
    const uint32_t n = p.degree();
    const uint64_t two_n = uint64_t(n) * 2;
    RnsPoly out(n, p.moduli(), Form::coeff);
    for (size_t l = 0; l < p.limb_count(); ++l) {
        const uint64_t q = p.modulus(l).value;
        const uint64_t* src = p.limb(l);
        uint64_t* dst = out.limb(l);
        for (uint32_t k = 0; k < n; ++k) {
            uint64_t idx = (uint64_t(k) * galois_exp) % two_n;
            uint64_t v = src[k];
            if (idx >= n) {
                idx -= n;
                v = neg_mod(v, q);
            }
            dst[idx] = v;
        }
    }
    return out;
}

}  // namespace ring
}  // namespace hevf
