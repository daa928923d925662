// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "hevf/rns_poly.hpp"

namespace hevf {

// Canonical-embedding encoder: real slot vectors of length <= N/2 to and
// from integer polynomials, scaled by a fixed-point factor.
class Encoder {
  public:
    explicit Encoder(uint32_t degree);

    uint32_t degree() const { return n_; }
    uint32_t slot_count() const { return n_ / 2; }

    // Coefficient-form polynomial over `moduli` holding round(scale * v) in
    // the embedding. Throws if v is too long or coefficients overflow the
    // modulus product.
    RnsPoly encode(const std::vector<double>& v, double scale, const std::vector<Modulus>& moduli) const;

    // Inverse map; input in coefficient form.
    std::vector<double> decode(const RnsPoly& p, double scale) const;

  private:
    void fft(std::vector<std::complex<double>>& buf, int sign) const;

    uint32_t n_;
    uint32_t log_n_;
    std::vector<uint32_t> slot_pos_;                 // slot j -> odd-power index
    std::vector<std::complex<double>> twist_;        // zeta^k, 2N-th roots
    std::vector<std::complex<double>> roots_;        // exp(2*pi*i*k/N)
    std::vector<uint32_t> bitrev_;
};

}  // namespace hevf
