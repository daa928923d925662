// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "hevf/linalg.hpp"

namespace hevf {

struct NewtonConfig {
    double x0 = 650.0;
    uint32_t iterations = 1;
    bool have_bounds = false;
    double a_min = 0.0, a_max = 0.0;  // bounds on 1/sqrt(a) used to derive x0
};

void check_newton_config(const NewtonConfig& cfg);

// x_{n+1} = 1.5 x_n - 0.5 a x_n^3, applied cfg.iterations times from cfg.x0.
double newton_inv_sqrt_plain(double a, const NewtonConfig& cfg);

// x0 = 0.45 (lo + hi) with lo/hi the 1st/99th percentiles of the supplied
// 1/sqrt(a) samples. Empty input is a configuration error; callers wanting
// the default 650 use NewtonConfig{} directly.
NewtonConfig derive_x0(const std::vector<double>& inv_sqrt_samples, uint32_t iterations = 1);

// w1^T Q w2 / sqrt(w1^T Q w1 * w2^T Q w2), the exact reference.
double cosine_score_plain(const std::vector<double>& w1, const std::vector<double>& w2,
                          const ProjectionMatrix& q);

// Same score with the exact inverse sqrt replaced by the Newton
// approximation; the plaintext oracle for the encrypted circuit.
double score_approx_plain(const std::vector<double>& w1, const std::vector<double>& w2,
                          const ProjectionMatrix& q, const NewtonConfig& cfg);

// Helpers shared with the harness.
double quadratic_form(const std::vector<double>& w1, const std::vector<double>& w2,
                      const ProjectionMatrix& q);  // w1^T Q w2

}  // namespace hevf
