// SPDX-License-Identifier: Apache-2.0
#include "hevf/encoding.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "hevf/common.hpp"

namespace hevf {

using boost::multiprecision::cpp_int;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Exact double -> integer conversion for magnitudes beyond 2^63.
cpp_int round_to_int(double x) {
    if (!std::isfinite(x)) throw param_error("encode: non-finite coefficient");
    double r = std::nearbyint(x);
    if (std::abs(r) < 9.2e18) return cpp_int(static_cast<long long>(r));
    int e = 0;
    double m = std::frexp(r, &e);  // r = m * 2^e, |m| in [0.5, 1)
    long long mant = static_cast<long long>(std::ldexp(m, 62));
    cpp_int v(mant);
    int shift = e - 62;
    if (shift > 0)
        v <<= shift;
    else
        v >>= -shift;
    return v;
}

uint64_t reduce_cpp(const cpp_int& x, const Modulus& q) {
    cpp_int r = x % q.value;
    if (r < 0) r += q.value;
    return r.convert_to<uint64_t>();
}

}  // namespace

Encoder::Encoder(uint32_t degree) : n_(degree) {
    log_n_ = 0;
    while ((uint32_t(1) << log_n_) < n_) ++log_n_;
    const uint32_t m = n_ / 2;
    const uint64_t two_n = uint64_t(n_) * 2;

    slot_pos_.resize(m);
    uint64_t g = 1;
    for (uint32_t j = 0; j < m; ++j) {
        slot_pos_[j] = static_cast<uint32_t>((g - 1) / 2);
        g = (g * 5) % two_n;
    }

    twist_.resize(n_);
    roots_.resize(n_);
    for (uint32_t k = 0; k < n_; ++k) {
        twist_[k] = std::polar(1.0, kPi * double(k) / double(n_));
        roots_[k] = std::polar(1.0, 2.0 * kPi * double(k) / double(n_));
    }

    bitrev_.resize(n_);
    for (uint32_t i = 0; i < n_; ++i) {
        uint32_t r = 0, v = i;
        for (uint32_t b = 0; b < log_n_; ++b) {
            r = (r << 1) | (v & 1);
            v >>= 1;
        }
        bitrev_[i] = r;
    }
}

void Encoder::fft(std::vector<std::complex<double>>& buf, int sign) const {
    for (uint32_t i = 0; i < n_; ++i) {
        uint32_t j = bitrev_[i];
        if (i < j) std::swap(buf[i], buf[j]);
    }
    for (uint32_t len = 2; len <= n_; len <<= 1) {
        uint32_t stride = n_ / len;
        for (uint32_t i = 0; i < n_; i += len) {
            for (uint32_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = roots_[k * stride];
                if (sign < 0) w = std::conj(w);
                std::complex<double> u = buf[i + k];
                std::complex<double> v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
            }
        }
    }
}

RnsPoly Encoder::encode(const std::vector<double>& v, double scale, const std::vector<Modulus>& moduli) const {
    const uint32_t m = n_ / 2;
    if (v.size() > m) throw param_error("encode: vector longer than slot count");
    if (scale <= 1.0) throw param_error("encode: scale must exceed 1");

    std::vector<std::complex<double>> buf(n_, {0.0, 0.0});
    for (size_t j = 0; j < v.size(); ++j) {
        double x = v[j] * scale;
        buf[slot_pos_[j]] = {x, 0.0};
        buf[n_ - 1 - slot_pos_[j]] = {x, 0.0};  // conjugate pair (real input)
    }
    fft(buf, -1);

    cpp_int bound = 1;
    for (const auto& q : moduli) bound *= q.value;
    cpp_int half = bound >> 1;

    RnsPoly p(n_, moduli, Form::coeff);
    const double inv_n = 1.0 / double(n_);
    for (uint32_t k = 0; k < n_; ++k) {
        std::complex<double> c = buf[k] * std::conj(twist_[k]);
        cpp_int coeff = round_to_int(c.real() * inv_n);
        if (coeff > half || -coeff > half)
            throw param_error("encode: scaled coefficients overflow the modulus chain");
        for (size_t l = 0; l < moduli.size(); ++l) p.limb(l)[k] = reduce_cpp(coeff, moduli[l]);
    }
    return p;
}

std::vector<double> Encoder::decode(const RnsPoly& p, double scale) const {
    if (p.form() != Form::coeff) throw param_error("decode: coefficient form required");
    if (p.degree() != n_) throw param_error("decode: degree mismatch");
    const uint32_t m = n_ / 2;
    const size_t limbs = p.limb_count();

    std::vector<std::complex<double>> buf(n_);
    if (limbs == 1) {
        const Modulus& q = p.modulus(0);
        const uint64_t half = q.value >> 1;
        for (uint32_t k = 0; k < n_; ++k) {
            uint64_t c = p.limb(0)[k];
            double x = c > half ? -double(q.value - c) : double(c);
            buf[k] = x * twist_[k];
        }
    } else {
        // Garner mixed-radix CRT, exact in big integers.
        std::vector<uint64_t> inv_prod(limbs * limbs, 0);
        for (size_t i = 1; i < limbs; ++i) {
            const Modulus& qi = p.modulus(i);
            for (size_t j = 0; j < i; ++j)
                inv_prod[i * limbs + j] = inv_mod(reduce_64(p.modulus(j).value, qi), qi);
        }
        cpp_int big_q = 1;
        for (size_t l = 0; l < limbs; ++l) big_q *= p.modulus(l).value;
        cpp_int half_q = big_q >> 1;
        std::vector<uint64_t> digits(limbs);
        for (uint32_t k = 0; k < n_; ++k) {
            digits[0] = p.limb(0)[k];
            for (size_t i = 1; i < limbs; ++i) {
                const Modulus& qi = p.modulus(i);
                uint64_t t = p.limb(i)[k];
                // t = (x_i - assembled value so far) / prod_{j<i} q_j  (mod q_i)
                for (size_t j = 0; j < i; ++j) {
                    t = sub_mod(t, reduce_64(digits[j], qi), qi.value);
                    t = mul_mod(t, inv_prod[i * limbs + j], qi);
                }
                digits[i] = t;
            }
            cpp_int val = digits[limbs - 1];
            for (size_t i = limbs - 1; i-- > 0;) {
                val *= p.modulus(i).value;
                val += digits[i];
            }
            if (val > half_q) val -= big_q;
            buf[k] = val.convert_to<double>() * twist_[k];
        }
    }
    fft(buf, +1);
    std::vector<double> out(m);
    for (uint32_t j = 0; j < m; ++j) out[j] = buf[slot_pos_[j]].real() / scale;
    return out;
}

}  // namespace hevf
