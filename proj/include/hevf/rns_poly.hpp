// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "hevf/modulus.hpp"
#include "hevf/ntt.hpp"

namespace hevf {

enum class Form : uint8_t { coeff = 0, ntt = 1 };

// Element of Z_q[X]/(X^N+1) in residue representation: one length-N
// coefficient vector per limb, all limbs in the same form.
class RnsPoly {
  public:
    RnsPoly() = default;
    RnsPoly(uint32_t degree, std::vector<Modulus> moduli, Form form = Form::coeff)
        : degree_(degree), moduli_(std::move(moduli)), form_(form), data_(size_t(degree) * moduli_.size(), 0) {}

    uint32_t degree() const { return degree_; }
    size_t limb_count() const { return moduli_.size(); }
    const std::vector<Modulus>& moduli() const { return moduli_; }
    const Modulus& modulus(size_t i) const { return moduli_[i]; }
    Form form() const { return form_; }
    void set_form(Form f) { form_ = f; }

    uint64_t* limb(size_t i) { return data_.data() + i * degree_; }
    const uint64_t* limb(size_t i) const { return data_.data() + i * degree_; }
    std::vector<uint64_t>& raw() { return data_; }
    const std::vector<uint64_t>& raw() const { return data_; }

    bool same_shape(const RnsPoly& o) const {
        if (degree_ != o.degree_ || moduli_.size() != o.moduli_.size()) return false;
        for (size_t i = 0; i < moduli_.size(); ++i)
            if (moduli_[i] != o.moduli_[i]) return false;
        return true;
    }

    void drop_limbs(size_t count) {
        moduli_.resize(moduli_.size() - count);
        data_.resize(size_t(degree_) * moduli_.size());
    }

  private:
    uint32_t degree_ = 0;
    std::vector<Modulus> moduli_;
    Form form_ = Form::coeff;
    std::vector<uint64_t> data_;
};

namespace ring {

void check_compatible(const RnsPoly& a, const RnsPoly& b);

void add_inplace(RnsPoly& a, const RnsPoly& b);
void sub_inplace(RnsPoly& a, const RnsPoly& b);
void negate_inplace(RnsPoly& a);
RnsPoly add(const RnsPoly& a, const RnsPoly& b);
RnsPoly sub(const RnsPoly& a, const RnsPoly& b);

void ntt_forward_inplace(RnsPoly& p, const TableCache& tables);
void ntt_inverse_inplace(RnsPoly& p, const TableCache& tables);
RnsPoly ntt_forward(const RnsPoly& p, const TableCache& tables);
RnsPoly ntt_inverse(const RnsPoly& p, const TableCache& tables);

// Pointwise product; both operands must be in NTT form.
void mul_pointwise_inplace(RnsPoly& a, const RnsPoly& b);
RnsPoly mul_pointwise(const RnsPoly& a, const RnsPoly& b);
// Fused a += b * c (all NTT form).
void mul_acc_pointwise(RnsPoly& a, const RnsPoly& b, const RnsPoly& c);
// Multiply one limb by a scalar.
void mul_scalar_limb_inplace(RnsPoly& a, size_t limb, uint64_t scalar);
void mul_scalar_inplace(RnsPoly& a, const std::vector<uint64_t>& scalar_per_limb);

// Negacyclic product via NTT (accepts coefficient-form inputs).
RnsPoly ring_mul(const RnsPoly& a, const RnsPoly& b, const TableCache& tables);

// RNS half of rescale: divide-and-round by the last limb's modulus, then
// drop that limb. Input and output in coefficient form.
RnsPoly drop_last_limb(const RnsPoly& p);

// Galois map X -> X^galois_exp on a coefficient-form polynomial.
RnsPoly apply_automorphism(const RnsPoly& p, uint64_t galois_exp);

}  // namespace ring

}  // namespace hevf
