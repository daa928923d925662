// SPDX-License-Identifier: Apache-2.0
#include "hevf/newton.hpp"

#include <algorithm>
#include <cmath>

namespace hevf {

void check_newton_config(const NewtonConfig& cfg) {
    if (!(cfg.x0 > 0.0)) throw param_error("newton: x0 must be positive");
    if (cfg.iterations < 1 || cfg.iterations > 2)
        throw param_error("newton: iterations must be 1 or 2 (got " + std::to_string(cfg.iterations) + ")");
}

double newton_inv_sqrt_plain(double a, const NewtonConfig& cfg) {
    check_newton_config(cfg);
    if (!(a > 0.0)) throw param_error("newton: argument must be positive");
    double x = cfg.x0;
    for (uint32_t i = 0; i < cfg.iterations; ++i) x = 1.5 * x - 0.5 * a * x * x * x;
    return x;
}

NewtonConfig derive_x0(const std::vector<double>& inv_sqrt_samples, uint32_t iterations) {
    if (inv_sqrt_samples.empty()) throw param_error("derive_x0: no samples supplied");
    std::vector<double> s = inv_sqrt_samples;
    std::sort(s.begin(), s.end());
    auto percentile = [&](double p) {
        double idx = p * double(s.size() - 1);
        size_t lo = size_t(idx);
        size_t hi = std::min(lo + 1, s.size() - 1);
        double frac = idx - double(lo);
        return s[lo] * (1.0 - frac) + s[hi] * frac;
    };
    NewtonConfig cfg;
    cfg.a_min = percentile(0.01);
    cfg.a_max = percentile(0.99);
    cfg.have_bounds = true;
    cfg.x0 = 0.45 * (cfg.a_min + cfg.a_max);
    cfg.iterations = iterations;
    check_newton_config(cfg);
    return cfg;
}

double quadratic_form(const std::vector<double>& w1, const std::vector<double>& w2,
                      const ProjectionMatrix& q) {
    if (w1.size() != w2.size()) throw param_error("score: vector dimensions differ");
    if (w1.size() != q.dim()) throw param_error("score: vector/matrix dimension mismatch");
    if (q.is_identity()) {
        double s = 0.0;
        for (size_t i = 0; i < w1.size(); ++i) s += w1[i] * w2[i];
        return s;
    }
    double s = 0.0;
    for (size_t i = 0; i < w1.size(); ++i) {
        if (w1[i] == 0.0) continue;
        double row = 0.0;
        for (size_t j = 0; j < w2.size(); ++j) row += q.entry(uint32_t(i), uint32_t(j)) * w2[j];
        s += w1[i] * row;
    }
    return s;
}

double cosine_score_plain(const std::vector<double>& w1, const std::vector<double>& w2,
                          const ProjectionMatrix& q) {
    double num = quadratic_form(w1, w2, q);
    double a1 = quadratic_form(w1, w1, q);
    double a2 = quadratic_form(w2, w2, q);
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw param_error("score: degenerate input, zero denominator");
    return num / std::sqrt(a1 * a2);
}

double score_approx_plain(const std::vector<double>& w1, const std::vector<double>& w2,
                          const ProjectionMatrix& q, const NewtonConfig& cfg) {
    check_newton_config(cfg);
    double num = quadratic_form(w1, w2, q);
    double a = quadratic_form(w1, w1, q) * quadratic_form(w2, w2, q);
    if (!(a > 0.0)) throw param_error("score: degenerate input, zero denominator");
    return newton_inv_sqrt_plain(a, cfg) * num;
}

}  // namespace hevf
