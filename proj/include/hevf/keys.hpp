// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "hevf/params.hpp"
#include "hevf/rns_poly.hpp"

namespace hevf {

// Ternary secret. Never serialized into server-side stores.
struct SecretKey {
    RnsPoly s_ntt;    // all key limbs, NTT form
    RnsPoly s_coeff;  // coefficient copy for automorphisms
    uint64_t params_hash = 0;
};

// RLWE pair (b, a) with b = -a*s + e over the ciphertext limbs.
struct PublicKey {
    RnsPoly b, a;
    uint64_t params_hash = 0;
};

// Key-switching key: one (b_j, a_j) pair per decomposition limb, each over
// the full chain including the special modulus.
struct KswKey {
    std::vector<RnsPoly> b, a;
};

struct RelinKey {
    KswKey key;
    uint64_t params_hash = 0;
};

struct GaloisKeys {
    std::map<uint32_t, KswKey> keys;  // rotation step -> key
    uint64_t params_hash = 0;

    bool has(uint32_t step) const { return keys.count(step) != 0; }
};

struct KeyBundle {
    SecretKey secret;
    PublicKey pub;
    RelinKey relin;
    GaloisKeys galois;
};

// Default rotation steps: powers of two up to slot_count/2, exactly what
// rotate-and-sum and the chained diagonal method need.
std::vector<uint32_t> default_rotation_steps(const ParamContext& ctx);

KeyBundle keygen(const ParamContext& ctx, Rng& rng, std::vector<uint32_t> rotation_steps = {});

// Key-switching key encrypting `target` (NTT form, all key limbs) under s.
KswKey make_ksw_key(const ParamContext& ctx, const SecretKey& sk, const RnsPoly& target, Rng& rng);

}  // namespace hevf
