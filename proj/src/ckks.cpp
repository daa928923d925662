// SPDX-License-Identifier: Apache-2.0
#include "hevf/ckks.hpp"

#include <algorithm>
#include <cmath>

#include "hevf/sampling.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hevf {

namespace {

constexpr double kNoiseSigma = 3.2;
constexpr double kScaleRelTol = 1e-9;

bool scales_close(double a, double b) {
    return std::abs(a - b) <= kScaleRelTol * std::max(std::abs(a), std::abs(b));
}

// Copy of the first `count` limbs.
RnsPoly take_limbs(const RnsPoly& p, size_t count) {
    RnsPoly out(p.degree(), std::vector<Modulus>(p.moduli().begin(), p.moduli().begin() + count), p.form());
    for (size_t l = 0; l < count; ++l) std::copy(p.limb(l), p.limb(l) + p.degree(), out.limb(l));
    return out;
}

// Centered residue transfer: value v in [0, q_from) reinterpreted as a
// signed integer in (-q_from/2, q_from/2], reduced mod q_to.
void reduce_centered_limb(const uint64_t* src, uint64_t* dst, uint32_t n, const Modulus& q_from,
                          const Modulus& q_to) {
    const uint64_t half = q_from.value >> 1;
    const uint64_t from_mod_to = reduce_64(q_from.value, q_to);
    for (uint32_t k = 0; k < n; ++k) {
        uint64_t r = reduce_64(src[k], q_to);
        if (src[k] > half) r = sub_mod(r, from_mod_to, q_to.value);
        dst[k] = r;
    }
}

}  // namespace

void Evaluator::check_hash(uint64_t h) const {
    if (h != ctx_.hash()) throw crypto_error("object was created under different parameters");
}

void Evaluator::check_same(const Ciphertext& a, const Ciphertext& b) {
    if (a.params_hash != b.params_hash) throw crypto_error("ciphertexts from different parameter sets");
    if (a.level != b.level)
        throw param_error("level mismatch: " + std::to_string(a.level) + " vs " + std::to_string(b.level) +
                          " (rescale or mod-switch first)");
}

RnsPoly Evaluator::encode(const std::vector<double>& v, double scale, uint32_t level) const {
    RnsPoly p = ctx_.encoder().encode(v, scale, ctx_.ct_moduli(level));
    ring::ntt_forward_inplace(p, ctx_.tables());
    return p;
}

Ciphertext Evaluator::encrypt(const RnsPoly& plain_ntt, double scale, uint32_t level, const PublicKey& pk,
                              Rng& rng) const {
    check_hash(pk.params_hash);
    const uint32_t n = ctx_.degree();
    const auto mods = ctx_.ct_moduli(level);
    const size_t limbs = mods.size();

    RnsPoly u = sample::ternary(n, mods, rng);
    ring::ntt_forward_inplace(u, ctx_.tables());
    RnsPoly e0 = sample::gaussian(n, mods, kNoiseSigma, rng);
    ring::ntt_forward_inplace(e0, ctx_.tables());
    RnsPoly e1 = sample::gaussian(n, mods, kNoiseSigma, rng);
    ring::ntt_forward_inplace(e1, ctx_.tables());

    RnsPoly pkb = pk.b.limb_count() == limbs ? pk.b : take_limbs(pk.b, limbs);
    RnsPoly pka = pk.a.limb_count() == limbs ? pk.a : take_limbs(pk.a, limbs);

    Ciphertext ct;
    ct.c0 = ring::mul_pointwise(pkb, u);
    ring::add_inplace(ct.c0, e0);
    ring::add_inplace(ct.c0, plain_ntt);
    ct.c1 = ring::mul_pointwise(pka, u);
    ring::add_inplace(ct.c1, e1);
    ct.level = level;
    ct.scale = scale;
    ct.slot_count = ctx_.slot_count();
    ct.params_hash = ctx_.hash();
    return ct;
}

Ciphertext Evaluator::encrypt(const std::vector<double>& v, const PublicKey& pk, Rng& rng, double scale,
                              int level) const {
    if (scale <= 0.0) scale = ctx_.params().delta();
    uint32_t lvl = level < 0 ? ctx_.levels() : uint32_t(level);
    return encrypt(encode(v, scale, lvl), scale, lvl, pk, rng);
}

RnsPoly Evaluator::decrypt_poly(const Ciphertext& ct, const SecretKey& sk) const {
    check_hash(ct.params_hash);
    check_hash(sk.params_hash);
    RnsPoly s = take_limbs(sk.s_ntt, ct.c0.limb_count());
    RnsPoly m = ring::mul_pointwise(ct.c1, s);
    ring::add_inplace(m, ct.c0);
    ring::ntt_inverse_inplace(m, ctx_.tables());
    return m;
}

std::vector<double> Evaluator::decrypt(const Ciphertext& ct, const SecretKey& sk) const {
    return ctx_.encoder().decode(decrypt_poly(ct, sk), ct.scale);
}

Ciphertext Evaluator::add(const Ciphertext& a, const Ciphertext& b) const {
    check_same(a, b);
    if (!scales_close(a.scale, b.scale))
        throw param_error("scale mismatch in add: " + std::to_string(a.scale) + " vs " +
                          std::to_string(b.scale));
    Ciphertext r = a;
    ring::add_inplace(r.c0, b.c0);
    ring::add_inplace(r.c1, b.c1);
    return r;
}

Ciphertext Evaluator::sub(const Ciphertext& a, const Ciphertext& b) const {
    return add(a, negate(b));
}

Ciphertext Evaluator::negate(const Ciphertext& a) const {
    Ciphertext r = a;
    ring::negate_inplace(r.c0);
    ring::negate_inplace(r.c1);
    return r;
}

Ciphertext Evaluator::add_plain(const Ciphertext& a, const std::vector<double>& v) const {
    Ciphertext r = a;
    ring::add_inplace(r.c0, encode(v, a.scale, a.level));
    return r;
}

Ciphertext Evaluator::mul_plain(const Ciphertext& a, const std::vector<double>& v, double plain_scale) const {
    if (plain_scale <= 0.0) plain_scale = ctx_.params().delta();
    return mul_plain_encoded(a, encode(v, plain_scale, a.level), plain_scale);
}

Ciphertext Evaluator::mul_plain_encoded(const Ciphertext& a, const RnsPoly& plain_ntt,
                                        double plain_scale) const {
    if (a.level == 0) throw param_error("level exhausted: cannot multiply at level 0");
    Ciphertext r = a;
    ring::mul_pointwise_inplace(r.c0, plain_ntt);
    ring::mul_pointwise_inplace(r.c1, plain_ntt);
    r.scale = a.scale * plain_scale;
    return r;
}

Ciphertext Evaluator::mul(const Ciphertext& a, const Ciphertext& b) const {
    check_same(a, b);
    if (a.level == 0) throw param_error("level exhausted: cannot multiply at level 0");
    if (!relin_) throw crypto_error("relinearization key not available");

    RnsPoly d0 = ring::mul_pointwise(a.c0, b.c0);
    RnsPoly d1 = ring::mul_pointwise(a.c0, b.c1);
    ring::mul_acc_pointwise(d1, a.c1, b.c0);
    RnsPoly d2 = ring::mul_pointwise(a.c1, b.c1);

    ring::ntt_inverse_inplace(d2, ctx_.tables());
    auto [k0, k1] = keyswitch(d2, relin_->key);

    Ciphertext r;
    r.c0 = std::move(d0);
    ring::add_inplace(r.c0, k0);
    r.c1 = std::move(d1);
    ring::add_inplace(r.c1, k1);
    r.level = a.level;
    r.scale = a.scale * b.scale;
    r.slot_count = a.slot_count;
    r.params_hash = a.params_hash;
    return r;
}

Ciphertext Evaluator::rescale(const Ciphertext& a) const {
    if (a.level == 0) throw param_error("level exhausted: cannot rescale at level 0");
    const uint32_t n = ctx_.degree();
    const size_t last = a.c0.limb_count() - 1;
    const Modulus& ql = a.c0.modulus(last);

    Ciphertext r;
    r.level = a.level - 1;
    r.scale = a.scale / double(ql.value);
    r.slot_count = a.slot_count;
    r.params_hash = a.params_hash;

    for (const RnsPoly* src : {&a.c0, &a.c1}) {
        // Last limb back to coefficients, then fold into each survivor.
        RnsPoly last_coeff(n, {ql}, Form::ntt);
        std::copy(src->limb(last), src->limb(last) + n, last_coeff.limb(0));
        ring::ntt_inverse_inplace(last_coeff, ctx_.tables());

        RnsPoly out(n, std::vector<Modulus>(src->moduli().begin(), src->moduli().end() - 1), Form::ntt);
        for (size_t l = 0; l < last; ++l) {
            const Modulus& qi = src->modulus(l);
            RnsPoly tmp(n, {qi}, Form::coeff);
            reduce_centered_limb(last_coeff.limb(0), tmp.limb(0), n, ql, qi);
            ring::ntt_forward_inplace(tmp, ctx_.tables());
            const uint64_t inv_ql = inv_mod(reduce_64(ql.value, qi), qi);
            const uint64_t inv_sh = shoup_precompute(inv_ql, qi.value);
            const uint64_t* s = src->limb(l);
            const uint64_t* t = tmp.limb(0);
            uint64_t* d = out.limb(l);
            for (uint32_t k = 0; k < n; ++k)
                d[k] = mul_mod_shoup(sub_mod(s[k], t[k], qi.value), inv_ql, inv_sh, qi.value);
        }
        (src == &a.c0 ? r.c0 : r.c1) = std::move(out);
    }
    return r;
}

Ciphertext Evaluator::mod_drop_to(const Ciphertext& a, uint32_t level) const {
    if (level > a.level) throw param_error("mod_drop_to: target level above current");
    if (level == a.level) return a;
    Ciphertext r = a;
    size_t keep = level + 1;
    r.c0.drop_limbs(r.c0.limb_count() - keep);
    r.c1.drop_limbs(r.c1.limb_count() - keep);
    r.level = level;
    return r;
}

std::pair<RnsPoly, RnsPoly> Evaluator::keyswitch(const RnsPoly& d_coeff, const KswKey& key) const {
    const uint32_t n = ctx_.degree();
    const size_t decomp = d_coeff.limb_count();
    const Modulus& special = ctx_.special_modulus();
    const size_t key_special = ctx_.key_moduli().size() - 1;  // index of special limb in key polys

    std::vector<Modulus> ext_mods = d_coeff.moduli();
    ext_mods.push_back(special);
    const size_t ext = ext_mods.size();

    RnsPoly acc0(n, ext_mods, Form::ntt);
    RnsPoly acc1(n, ext_mods, Form::ntt);

#pragma omp parallel
    {
        RnsPoly loc0(n, ext_mods, Form::ntt);
        RnsPoly loc1(n, ext_mods, Form::ntt);
#pragma omp for schedule(static) nowait
        for (int j = 0; j < int(decomp); ++j) {
            // Lift limb j across the extended basis and transform.
            RnsPoly dj(n, ext_mods, Form::coeff);
            const uint64_t* src = d_coeff.limb(j);
            for (size_t i = 0; i < ext; ++i) {
                const Modulus& qi = ext_mods[i];
                uint64_t* dst = dj.limb(i);
                if (qi == d_coeff.modulus(j)) {
                    std::copy(src, src + n, dst);
                } else {
                    for (uint32_t k = 0; k < n; ++k) dst[k] = reduce_64(src[k], qi);
                }
            }
            ring::ntt_forward_inplace(dj, ctx_.tables());

            const RnsPoly& kb = key.b[j];
            const RnsPoly& ka = key.a[j];
            for (size_t i = 0; i < ext; ++i) {
                size_t ki = (i + 1 == ext) ? key_special : i;
                const Modulus& qi = ext_mods[i];
                const uint64_t* pd = dj.limb(i);
                const uint64_t* pb = kb.limb(ki);
                const uint64_t* pa = ka.limb(ki);
                uint64_t* a0 = loc0.limb(i);
                uint64_t* a1 = loc1.limb(i);
                for (uint32_t k = 0; k < n; ++k) {
                    a0[k] = add_mod(a0[k], mul_mod(pd[k], pb[k], qi), qi.value);
                    a1[k] = add_mod(a1[k], mul_mod(pd[k], pa[k], qi), qi.value);
                }
            }
        }
#pragma omp critical
        {
            ring::add_inplace(acc0, loc0);
            ring::add_inplace(acc1, loc1);
        }
    }

    // Divide by the special modulus and return to the ciphertext basis.
    std::pair<RnsPoly, RnsPoly> out;
    for (RnsPoly* acc : {&acc0, &acc1}) {
        RnsPoly sp(n, {special}, Form::ntt);
        std::copy(acc->limb(ext - 1), acc->limb(ext - 1) + n, sp.limb(0));
        ring::ntt_inverse_inplace(sp, ctx_.tables());

        RnsPoly res(n, d_coeff.moduli(), Form::ntt);
        for (size_t l = 0; l < decomp; ++l) {
            const Modulus& qi = ext_mods[l];
            RnsPoly tmp(n, {qi}, Form::coeff);
            reduce_centered_limb(sp.limb(0), tmp.limb(0), n, special, qi);
            ring::ntt_forward_inplace(tmp, ctx_.tables());
            const uint64_t inv_p = inv_mod(reduce_64(special.value, qi), qi);
            const uint64_t inv_sh = shoup_precompute(inv_p, qi.value);
            const uint64_t* s = acc->limb(l);
            const uint64_t* t = tmp.limb(0);
            uint64_t* d = res.limb(l);
            for (uint32_t k = 0; k < n; ++k)
                d[k] = mul_mod_shoup(sub_mod(s[k], t[k], qi.value), inv_p, inv_sh, qi.value);
        }
        (acc == &acc0 ? out.first : out.second) = std::move(res);
    }
    return out;
}

Ciphertext Evaluator::rotate_one(const Ciphertext& a, uint32_t step) const {
    const uint64_t g = ctx_.galois_exp(step);
    RnsPoly c0 = ring::ntt_inverse(a.c0, ctx_.tables());
    RnsPoly c1 = ring::ntt_inverse(a.c1, ctx_.tables());
    c0 = ring::apply_automorphism(c0, g);
    c1 = ring::apply_automorphism(c1, g);

    auto [k0, k1] = keyswitch(c1, galois_->keys.at(step));
    ring::ntt_forward_inplace(c0, ctx_.tables());

    Ciphertext r;
    r.c0 = std::move(c0);
    ring::add_inplace(r.c0, k0);
    r.c1 = std::move(k1);
    r.level = a.level;
    r.scale = a.scale;
    r.slot_count = a.slot_count;
    r.params_hash = a.params_hash;
    return r;
}

Ciphertext Evaluator::rotate(const Ciphertext& a, uint32_t steps) const {
    steps %= ctx_.slot_count();
    if (steps == 0) return a;
    if (!galois_) throw crypto_error("Galois keys not available");
    if (galois_->has(steps)) return rotate_one(a, steps);

    // Compose from power-of-two steps.
    Ciphertext cur = a;
    for (uint32_t bit = 0; (uint32_t(1) << bit) <= steps; ++bit) {
        uint32_t s = uint32_t(1) << bit;
        if (steps & s) {
            if (!galois_->has(s))
                throw crypto_error("missing Galois key for step " + std::to_string(s) +
                                   " and no decomposition path");
            cur = rotate_one(cur, s);
        }
    }
    return cur;
}

Ciphertext Evaluator::align_to(const Ciphertext& a, uint32_t target_level, double target_scale) const {
    if (target_level > a.level) throw param_error("align_to: target level above current");
    if (target_level == a.level) {
        if (!scales_close(a.scale, target_scale))
            throw param_error("align_to: cannot change scale without a level to spend");
        return a;
    }
    Ciphertext cur = a;
    const std::vector<double> ones(ctx_.slot_count(), 1.0);
    while (cur.level > target_level) {
        const uint32_t drops = cur.level - target_level;
        const Modulus& ql = cur.c0.modulus(cur.c0.limb_count() - 1);
        // Per-step correction so the final drop lands exactly on target_scale;
        // intermediate steps split the remaining ratio evenly.
        double ratio = target_scale / cur.scale;
        double plain_scale = std::pow(ratio, 1.0 / double(drops)) * double(ql.value);
        cur = mul_plain(cur, ones, plain_scale);
        cur = rescale(cur);
    }
    return cur;
}

}  // namespace hevf
