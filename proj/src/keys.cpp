// SPDX-License-Identifier: Apache-2.0
#include "hevf/keys.hpp"

#include "hevf/sampling.hpp"

namespace hevf {

namespace {
constexpr double kNoiseSigma = 3.2;
}

std::vector<uint32_t> default_rotation_steps(const ParamContext& ctx) {
    std::vector<uint32_t> steps;
    for (uint32_t s = 1; s <= ctx.slot_count() / 2; s <<= 1) steps.push_back(s);
    return steps;
}

KswKey make_ksw_key(const ParamContext& ctx, const SecretKey& sk, const RnsPoly& target, Rng& rng) {
    const auto& key_mods = ctx.key_moduli();
    const uint32_t n = ctx.degree();
    const size_t decomp = key_mods.size() - 1;  // base + L delta limbs
    const Modulus& special = ctx.special_modulus();

    KswKey out;
    out.b.reserve(decomp);
    out.a.reserve(decomp);
    for (size_t j = 0; j < decomp; ++j) {
        RnsPoly a = sample::uniform(n, key_mods, rng);
        a.set_form(Form::ntt);  // uniform in either domain
        RnsPoly e = sample::gaussian(n, key_mods, kNoiseSigma, rng);
        ring::ntt_forward_inplace(e, ctx.tables());

        RnsPoly b = ring::mul_pointwise(a, sk.s_ntt);
        ring::negate_inplace(b);
        ring::add_inplace(b, e);

        // Gadget term: P * target on limb j only (P = 0 on the special limb).
        const Modulus& qj = key_mods[j];
        uint64_t p_mod_qj = reduce_64(special.value, qj);
        uint64_t p_sh = shoup_precompute(p_mod_qj, qj.value);
        uint64_t* bj = b.limb(j);
        const uint64_t* tj = target.limb(j);
        for (uint32_t k = 0; k < n; ++k)
            bj[k] = add_mod(bj[k], mul_mod_shoup(tj[k], p_mod_qj, p_sh, qj.value), qj.value);

        out.b.push_back(std::move(b));
        out.a.push_back(std::move(a));
    }
    return out;
}

KeyBundle keygen(const ParamContext& ctx, Rng& rng, std::vector<uint32_t> rotation_steps) {
    const uint32_t n = ctx.degree();
    const auto& key_mods = ctx.key_moduli();
    const auto ct_mods = ctx.ct_moduli(ctx.levels());

    KeyBundle kb;
    kb.secret.s_coeff = sample::ternary(n, key_mods, rng);
    kb.secret.s_ntt = ring::ntt_forward(kb.secret.s_coeff, ctx.tables());
    kb.secret.params_hash = ctx.hash();

    // Public key over the ciphertext limbs only.
    RnsPoly s_ct(n, ct_mods, Form::ntt);
    for (size_t l = 0; l < ct_mods.size(); ++l)
        std::copy(kb.secret.s_ntt.limb(l), kb.secret.s_ntt.limb(l) + n, s_ct.limb(l));

    RnsPoly a = sample::uniform(n, ct_mods, rng);
    a.set_form(Form::ntt);
    RnsPoly e = sample::gaussian(n, ct_mods, kNoiseSigma, rng);
    ring::ntt_forward_inplace(e, ctx.tables());
    RnsPoly b = ring::mul_pointwise(a, s_ct);
    ring::negate_inplace(b);
    ring::add_inplace(b, e);
    kb.pub.b = std::move(b);
    kb.pub.a = std::move(a);
    kb.pub.params_hash = ctx.hash();

    RnsPoly s2 = ring::mul_pointwise(kb.secret.s_ntt, kb.secret.s_ntt);
    kb.relin.key = make_ksw_key(ctx, kb.secret, s2, rng);
    kb.relin.params_hash = ctx.hash();

    if (rotation_steps.empty()) rotation_steps = default_rotation_steps(ctx);
    for (uint32_t step : rotation_steps) {
        RnsPoly s_rot = ring::apply_automorphism(kb.secret.s_coeff, ctx.galois_exp(step));
        ring::ntt_forward_inplace(s_rot, ctx.tables());
        kb.galois.keys.emplace(step, make_ksw_key(ctx, kb.secret, s_rot, rng));
    }
    kb.galois.params_hash = ctx.hash();
    return kb;
}

}  // namespace hevf
