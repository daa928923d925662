// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hevf/newton.hpp"

using namespace hevf;

TEST_CASE("config validation") {
    NewtonConfig ok;
    check_newton_config(ok);
    NewtonConfig bad_x0;
    bad_x0.x0 = 0.0;
    CHECK_THROWS_AS(check_newton_config(bad_x0), param_error);
    NewtonConfig bad_it;
    bad_it.iterations = 0;
    CHECK_THROWS_AS(check_newton_config(bad_it), param_error);
    bad_it.iterations = 3;
    CHECK_THROWS_AS(check_newton_config(bad_it), param_error);
}

TEST_CASE("exact fixed point stays put") {
    // x0 = 1/sqrt(a) exactly: the iteration must not move.
    NewtonConfig cfg;
    cfg.x0 = 0.5;
    cfg.iterations = 1;
    CHECK(newton_inv_sqrt_plain(4.0, cfg) == doctest::Approx(0.5).epsilon(1e-15));
    cfg.iterations = 2;
    CHECK(newton_inv_sqrt_plain(4.0, cfg) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("hand-computed iterates") {
    // a = 0.25, x0 = 1.5: x1 = 1.5*1.5 - 0.5*0.25*1.5^3 = 1.828125,
    // x2 = 1.5*x1 - 0.125*x1^3 = 1.9784789085388184 (exact in binary64).
    NewtonConfig cfg;
    cfg.x0 = 1.5;
    cfg.iterations = 1;
    CHECK(newton_inv_sqrt_plain(0.25, cfg) == doctest::Approx(1.828125).epsilon(1e-15));
    cfg.iterations = 2;
    CHECK(newton_inv_sqrt_plain(0.25, cfg) == doctest::Approx(1.9784789085388184).epsilon(1e-14));
}

TEST_CASE("convergence inside the operating band") {
    NewtonConfig cfg;  // x0 = 650
    cfg.iterations = 2;
    for (double inv : {1.0 / 600.0, 1.0 / 650.0, 1.0 / 700.0}) {
        double a = inv * inv;
        double rel = std::abs(newton_inv_sqrt_plain(a, cfg) - 1.0 / std::sqrt(a)) * std::sqrt(a);
        CHECK(rel < 2e-3);
    }
}

TEST_CASE("nonpositive argument rejected") {
    NewtonConfig cfg;
    CHECK_THROWS_AS(newton_inv_sqrt_plain(0.0, cfg), param_error);
    CHECK_THROWS_AS(newton_inv_sqrt_plain(-1.0, cfg), param_error);
}

TEST_CASE("derive_x0 from a sample band") {
    // Samples uniformly covering [450, 850]: the 1%/99% percentiles sit at
    // 454 and 846, so x0 = 0.45 * (454 + 846) = 585.
    std::vector<double> s;
    for (int i = 0; i <= 400; ++i) s.push_back(450.0 + double(i));
    auto cfg = derive_x0(s, 2);
    CHECK(cfg.iterations == 2);
    CHECK(cfg.have_bounds);
    CHECK(cfg.a_min == doctest::Approx(454.0).epsilon(1e-12));
    CHECK(cfg.a_max == doctest::Approx(846.0).epsilon(1e-12));
    CHECK(cfg.x0 == doctest::Approx(585.0).epsilon(1e-12));
    CHECK_THROWS_AS(derive_x0({}, 1), param_error);
}

TEST_CASE("quadratic form against direct summation") {
    Rng rng(31);
    const uint32_t d = 7;
    std::vector<std::vector<double>> m(d, std::vector<double>(d));
    for (uint32_t i = 0; i < d; ++i)
        for (uint32_t j = i; j < d; ++j) m[i][j] = m[j][i] = 2.0 * rng.uniform01() - 1.0;
    ProjectionMatrix q(m);
    std::vector<double> w1(d), w2(d);
    for (auto& x : w1) x = 2.0 * rng.uniform01() - 1.0;
    for (auto& x : w2) x = 2.0 * rng.uniform01() - 1.0;
    double direct = 0.0;
    for (uint32_t i = 0; i < d; ++i)
        for (uint32_t j = 0; j < d; ++j) direct += w1[i] * m[i][j] * w2[j];
    CHECK(quadratic_form(w1, w2, q) == doctest::Approx(direct).epsilon(1e-12));
    CHECK_THROWS_AS(quadratic_form(w1, std::vector<double>(d + 1, 0.0), q), param_error);
}

TEST_CASE("cosine score with identity projection is plain cosine") {
    std::vector<double> w1 = {3.0, 0.0, 4.0};
    std::vector<double> w2 = {3.0, 0.0, 4.0};
    auto q = ProjectionMatrix::identity(3);
    CHECK(cosine_score_plain(w1, w2, q) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> w3 = {-4.0, 0.0, 3.0};
    CHECK(cosine_score_plain(w1, w3, q) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("approximate score tracks the exact score in band") {
    // Norms chosen so (w1 Q w1)(w2 Q w2) lands near x0 = 650 territory.
    Rng rng(92);
    const uint32_t d = 16;
    auto q = ProjectionMatrix::identity(d);
    std::vector<double> w1(d), w2(d);
    for (auto& x : w1) x = rng.gaussian();
    for (auto& x : w2) x = rng.gaussian();
    auto scale_to = [](std::vector<double>& w, double norm2) {
        double s = 0.0;
        for (double x : w) s += x * x;
        double f = std::sqrt(norm2 / s);
        for (double& x : w) x *= f;
    };
    scale_to(w1, 1.0 / 625.0);
    scale_to(w2, 1.0 / 676.0);  // 1/sqrt(a) = 25 * 26 = 650
    NewtonConfig cfg;
    cfg.iterations = 2;
    double exact = cosine_score_plain(w1, w2, q);
    double approx = score_approx_plain(w1, w2, q, cfg);
    CHECK(std::abs(approx - exact) < 2e-3);
}
