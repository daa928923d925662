// SPDX-License-Identifier: Apache-2.0
#include "hevf/params.hpp"

#include <cmath>

#include "hevf/common.hpp"

namespace hevf {

namespace {

struct BudgetRow {
    uint32_t degree;
    uint32_t max_bits[3];  // 128, 192, 256
};

// Security budget table (homomorphic encryption standard levels).
constexpr BudgetRow kBudget[] = {
    {1024, {27, 19, 14}},   {2048, {54, 37, 29}},    {4096, {109, 75, 58}},
    {8192, {218, 152, 118}}, {16384, {438, 305, 237}}, {32768, {881, 611, 476}},
};

}  // namespace

uint32_t max_modulus_bits(uint32_t degree, uint32_t security_bits) {
    int col = security_bits <= 128 ? 0 : (security_bits <= 192 ? 1 : 2);
    for (const auto& row : kBudget)
        if (row.degree == degree) return row.max_bits[col];
    return 0;
}

ParameterSet preset_set1() {
    ParameterSet p;
    p.name = "set1";
    p.degree = 8192;
    p.levels = 4;
    p.delta_bits = 34;
    p.chain_bits = {41, 34, 34, 34, 34, 41};
    p.security_bits = 128;
    return p;
}

ParameterSet preset_set2() {
    ParameterSet p;
    p.name = "set2";
    p.degree = 16384;
    p.levels = 4;
    p.delta_bits = 40;
    p.chain_bits = {60, 40, 40, 40, 40, 60};
    p.security_bits = 128;
    return p;
}

ParameterSet preset_set3() {
    ParameterSet p;
    p.name = "set3";
    p.degree = 16384;
    p.levels = 6;
    p.delta_bits = 40;
    p.chain_bits = {60, 40, 40, 40, 40, 40, 40, 60};
    p.security_bits = 128;
    return p;
}

ParameterSet preset_by_name(const std::string& name) {
    if (name == "set1") return preset_set1();
    if (name == "set2") return preset_set2();
    if (name == "set3") return preset_set3();
    throw param_error("unknown preset '" + name + "' (expected set1|set2|set3)");
}

ParameterSet validate_params(ParameterSet c) {
    if (c.degree < 8 || (c.degree & (c.degree - 1)) != 0) throw param_error("degree must be a power of two >= 8");
    if (c.chain_bits.size() < 3) throw param_error("modulus chain needs at least base, one level, special");
    if (c.levels + 2 != c.chain_bits.size())
        throw param_error("chain length must be levels + 2 (base + L deltas + special)");
    if (c.delta_bits < 20 || c.delta_bits > 60) throw param_error("delta exponent out of range [20, 60]");
    if (c.security_bits != 0) {
        uint32_t bound = max_modulus_bits(c.degree, c.security_bits);
        if (bound == 0) throw param_error("no security budget known for degree " + std::to_string(c.degree));
        uint32_t used = c.total_bits();
        if (used > bound)
            throw param_error("modulus chain uses " + std::to_string(used) + " bits, exceeding the " +
                              std::to_string(bound) + "-bit budget for N=" + std::to_string(c.degree) + " at " +
                              std::to_string(c.security_bits) + "-bit security");
        c.security_margin = used < bound;
    }
    return c;
}

ParamContext::ParamContext(ParameterSet params)
    : params_(validate_params(std::move(params))), tables_(params_.degree) {
    key_moduli_ = generate_ntt_primes(params_.degree, params_.chain_bits);
    tables_.warm(key_moduli_);
    encoder_ = std::make_shared<const Encoder>(params_.degree);

    uint64_t h = fnv1a64(&params_.degree, sizeof(params_.degree));
    h = fnv1a64(&params_.delta_bits, sizeof(params_.delta_bits), h);
    h = fnv1a64(&params_.levels, sizeof(params_.levels), h);
    h = fnv1a64(&params_.security_bits, sizeof(params_.security_bits), h);
    for (const auto& m : key_moduli_) h = fnv1a64(&m.value, sizeof(m.value), h);
    hash_ = h;
}

std::vector<Modulus> ParamContext::ct_moduli(uint32_t level) const {
    if (level > params_.levels) throw param_error("level exceeds parameter set maximum");
    return std::vector<Modulus>(key_moduli_.begin(), key_moduli_.begin() + level + 1);
}

uint64_t ParamContext::galois_exp(uint32_t steps) const {
    const uint64_t two_n = uint64_t(params_.degree) * 2;
    uint64_t g = 1;
    for (uint32_t i = 0; i < steps % slot_count(); ++i) g = (g * 5) % two_n;
    return g;
}

}  // namespace hevf
