// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hevf/encoding.hpp"
#include "hevf/modulus.hpp"
#include "hevf/ntt.hpp"

namespace hevf {

// Maximum total modulus bits for a given ring degree and security target.
// Returns 0 if the degree is not tabulated.
uint32_t max_modulus_bits(uint32_t degree, uint32_t security_bits);

struct ParameterSet {
    std::string name = "custom";
    uint32_t degree = 0;                 // N, power of two
    std::vector<uint32_t> chain_bits;    // [base, delta-sized x L, special]
    uint32_t delta_bits = 0;             // log2 of the scaling factor
    uint32_t levels = 0;                 // L, multiplications per fresh ciphertext
    uint32_t security_bits = 128;        // 0 = toy parameters, no security claim
    bool security_margin = false;        // set by validate: strictly below the bound

    uint32_t slot_count() const { return degree / 2; }
    double delta() const { return std::ldexp(1.0, int(delta_bits)); }
    uint32_t total_bits() const {
        uint32_t s = 0;
        for (uint32_t b : chain_bits) s += b;
        return s;
    }
};

// Paper presets (Table 3).
ParameterSet preset_set1();  // N=8192,  q0=41, delta=34, L=4, special=41 -> 218 bits
ParameterSet preset_set2();  // N=16384, q0=60, delta=40, L=4, special=60 -> 280 bits
ParameterSet preset_set3();  // N=16384, q0=60, delta=40, L=6, special=60 -> 360 bits
ParameterSet preset_by_name(const std::string& name);

// Checks structure and the security budget table; returns the set with the
// security_margin annotation filled in. Throws param_error when over budget.
ParameterSet validate_params(ParameterSet candidate);

// Immutable evaluation context: concrete moduli, NTT tables, hash.
class ParamContext {
  public:
    explicit ParamContext(ParameterSet params);

    const ParameterSet& params() const { return params_; }
    uint32_t degree() const { return params_.degree; }
    uint32_t slot_count() const { return params_.slot_count(); }
    uint32_t levels() const { return params_.levels; }

    // Full chain: base, L delta limbs, special. Ciphertexts never carry the
    // special limb; it exists for key switching only.
    const std::vector<Modulus>& key_moduli() const { return key_moduli_; }
    const Modulus& special_modulus() const { return key_moduli_.back(); }

    // Moduli active in a ciphertext at the given level (level+1 limbs).
    std::vector<Modulus> ct_moduli(uint32_t level) const;

    const TableCache& tables() const { return tables_; }
    const Encoder& encoder() const { return *encoder_; }
    uint64_t hash() const { return hash_; }

    // Galois element for a cyclic left slot rotation by `steps`.
    uint64_t galois_exp(uint32_t steps) const;

  private:
    ParameterSet params_;
    std::vector<Modulus> key_moduli_;
    TableCache tables_;
    std::shared_ptr<const Encoder> encoder_;
    uint64_t hash_ = 0;
};

}  // namespace hevf
