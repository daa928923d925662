// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hevf/keys.hpp"
#include "hevf/params.hpp"

namespace hevf {

// Two-element CKKS ciphertext. `level` counts remaining multiplications;
// a ciphertext at level l carries l+1 limbs. Scale is tracked explicitly
// as the true quotient after every rescale, never snapped back to 2^delta.
struct Ciphertext {
    RnsPoly c0, c1;  // NTT form
    uint32_t level = 0;
    double scale = 0.0;
    uint32_t slot_count = 0;
    uint64_t params_hash = 0;
};

// All homomorphic operations. Pure with respect to inputs; safe to call
// concurrently against shared immutable keys.
class Evaluator {
  public:
    explicit Evaluator(const ParamContext& ctx, const RelinKey* relin = nullptr,
                       const GaloisKeys* galois = nullptr)
        : ctx_(ctx), relin_(relin), galois_(galois) {}

    const ParamContext& context() const { return ctx_; }
    void set_relin(const RelinKey* k) { relin_ = k; }
    void set_galois(const GaloisKeys* k) { galois_ = k; }

    // Encode at a given level; NTT form, ready for plaintext operations.
    RnsPoly encode(const std::vector<double>& v, double scale, uint32_t level) const;

    Ciphertext encrypt(const RnsPoly& plain_ntt, double scale, uint32_t level, const PublicKey& pk,
                       Rng& rng) const;
    Ciphertext encrypt(const std::vector<double>& v, const PublicKey& pk, Rng& rng, double scale = 0.0,
                       int level = -1) const;

    RnsPoly decrypt_poly(const Ciphertext& ct, const SecretKey& sk) const;  // coefficient form
    std::vector<double> decrypt(const Ciphertext& ct, const SecretKey& sk) const;

    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const;
    Ciphertext negate(const Ciphertext& a) const;
    Ciphertext add_plain(const Ciphertext& a, const std::vector<double>& v) const;

    // Multiplies scales; caller rescales when appropriate.
    Ciphertext mul_plain(const Ciphertext& a, const std::vector<double>& v, double plain_scale = 0.0) const;
    Ciphertext mul_plain_encoded(const Ciphertext& a, const RnsPoly& plain_ntt, double plain_scale) const;

    // Tensor + relinearize. Output scale = scale_a * scale_b; no rescale.
    Ciphertext mul(const Ciphertext& a, const Ciphertext& b) const;

    // Divide by the last chain modulus: level-1, scale/q_last.
    Ciphertext rescale(const Ciphertext& a) const;

    // Drop limbs without dividing: same scale at a lower level.
    Ciphertext mod_drop_to(const Ciphertext& a, uint32_t level) const;

    // Cyclic left rotation of slots by `steps`; consumes no level.
    Ciphertext rotate(const Ciphertext& a, uint32_t steps) const;

    // Multiply by an all-ones plaintext chosen so the result lands exactly
    // at (target_level, target_scale); consumes level - target_level levels.
    Ciphertext align_to(const Ciphertext& a, uint32_t target_level, double target_scale) const;

  private:
    void check_hash(uint64_t h) const;
    static void check_same(const Ciphertext& a, const Ciphertext& b);
    std::pair<RnsPoly, RnsPoly> keyswitch(const RnsPoly& d_coeff, const KswKey& key) const;
    Ciphertext rotate_one(const Ciphertext& a, uint32_t step) const;

    const ParamContext& ctx_;
    const RelinKey* relin_;
    const GaloisKeys* galois_;
};

}  // namespace hevf
