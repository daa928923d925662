// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hevf/score.hpp"

using namespace hevf;

namespace {

ParamContext toy_context(uint32_t levels) {
    ParameterSet p;
    p.name = "toy";
    p.degree = 2048;
    p.levels = levels;
    p.delta_bits = 40;
    p.chain_bits.assign(levels + 2, 40);
    p.chain_bits.front() = 50;
    p.chain_bits.back() = 50;
    p.security_bits = 0;
    return ParamContext(p);
}

struct Fixture {
    explicit Fixture(uint32_t levels) : ctx(toy_context(levels)), rng(909), keys(keygen(ctx, rng)), ev(ctx, &keys.relin, &keys.galois) {}

    ParamContext ctx;
    Rng rng;
    KeyBundle keys;
    Evaluator ev;

    // Random vector rescaled so w^T Q w == norm2.
    std::vector<double> vec_in_band(uint32_t d, const ProjectionMatrix& q, double norm2) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.gaussian();
        double s = quadratic_form(v, v, q);
        double f = std::sqrt(norm2 / s);
        for (auto& x : v) x *= f;
        return v;
    }
};

ProjectionMatrix random_psd(uint32_t d, Rng& rng) {
    std::vector<std::vector<double>> p(d, std::vector<double>(d));
    for (auto& row : p)
        for (auto& x : row) x = 2.0 * rng.uniform01() - 1.0;
    return ProjectionMatrix::from_projection(p);
}

}  // namespace

TEST_CASE("plan levels and report") {
    auto p1 = make_plan(1, 4);
    CHECK(p1.required_levels == 4);
    CHECK_FALSE(p1.stages.empty());
    CHECK_FALSE(p1.report().empty());
    auto p2 = make_plan(2, 6);
    CHECK(p2.required_levels == 6);
    CHECK(make_plan(1, 7).required_levels == 4);
}

TEST_CASE("plan rejects short chains and bad iteration counts") {
    CHECK_THROWS_AS(make_plan(2, 4), param_error);
    CHECK_THROWS_AS(make_plan(1, 3), param_error);
    CHECK_THROWS_AS(make_plan(0, 8), param_error);
    CHECK_THROWS_AS(make_plan(3, 8), param_error);
}

TEST_CASE("one-iteration encrypted score matches the plaintext oracle") {
    Fixture f(4);
    const uint32_t d = 8;
    Rng qrng(5);
    auto q = random_psd(d, qrng);
    NewtonConfig cfg;  // x0 = 650, 1 iteration
    auto w1 = f.vec_in_band(d, q, 1.0 / 676.0);
    auto w2 = f.vec_in_band(d, q, 1.0 / 625.0);

    auto rec = make_enrollment("alice", w1, cfg, f.ev, f.keys.pub, f.rng);
    CHECK(rec.dim == d);
    auto ct_w2 = f.ev.encrypt(w2, f.keys.pub, f.rng);
    auto plan = make_plan(1, f.ctx.levels());
    auto ct_score = score_encrypted(f.ev, rec, ct_w2, q, plan);
    CHECK(ct_score.level == 0);

    double got = f.ev.decrypt(ct_score, f.keys.secret)[0];
    double want = score_approx_plain(w1, w2, q, cfg);
    CHECK(std::abs(got - want) < 5e-3);
}

TEST_CASE("two-iteration encrypted score matches the plaintext oracle") {
    Fixture f(6);
    const uint32_t d = 8;
    Rng qrng(6);
    auto q = random_psd(d, qrng);
    NewtonConfig cfg;
    cfg.iterations = 2;
    auto w1 = f.vec_in_band(d, q, 1.0 / 576.0);
    auto w2 = f.vec_in_band(d, q, 1.0 / 729.0);

    auto rec = make_enrollment("bob", w1, cfg, f.ev, f.keys.pub, f.rng);
    auto ct_w2 = f.ev.encrypt(w2, f.keys.pub, f.rng);
    auto plan = make_plan(2, f.ctx.levels());
    auto ct_score = score_encrypted(f.ev, rec, ct_w2, q, plan);
    CHECK(ct_score.level == 0);

    double got = f.ev.decrypt(ct_score, f.keys.secret)[0];
    double want = score_approx_plain(w1, w2, q, cfg);
    double exact = cosine_score_plain(w1, w2, q);
    CHECK(std::abs(got - want) < 5e-3);
    // Two refined iterations should sit close to the true cosine too.
    CHECK(std::abs(got - exact) < 2e-2);
}

TEST_CASE("identity projection, non-power-of-two dimension") {
    Fixture f(4);
    const uint32_t d = 5;
    auto q = ProjectionMatrix::identity(d);
    NewtonConfig cfg;
    auto w1 = f.vec_in_band(d, q, 1.0 / 625.0);
    auto w2 = f.vec_in_band(d, q, 1.0 / 700.0);
    auto rec = make_enrollment("carol", w1, cfg, f.ev, f.keys.pub, f.rng);
    auto ct_w2 = f.ev.encrypt(w2, f.keys.pub, f.rng);
    auto plan = make_plan(1, f.ctx.levels());
    double got = f.ev.decrypt(score_encrypted(f.ev, rec, ct_w2, q, plan), f.keys.secret)[0];
    double want = score_approx_plain(w1, w2, q, cfg);
    CHECK(std::abs(got - want) < 5e-3);
}

TEST_CASE("dimension mismatch is rejected") {
    Fixture f(4);
    auto q = ProjectionMatrix::identity(8);
    NewtonConfig cfg;
    auto w1 = f.vec_in_band(8, q, 1.0 / 625.0);
    auto rec = make_enrollment("dave", w1, cfg, f.ev, f.keys.pub, f.rng);
    auto q16 = ProjectionMatrix::identity(16);
    auto ct = f.ev.encrypt(f.vec_in_band(8, q, 1.0 / 625.0), f.keys.pub, f.rng);
    auto plan = make_plan(1, f.ctx.levels());
    CHECK_THROWS_AS(score_encrypted(f.ev, rec, ct, q16, plan), param_error);
}

TEST_CASE("multi-block query scores several pairs at once") {
    Fixture f(4);
    const uint32_t d = 8, n = 8;
    Rng qrng(7);
    auto q = random_psd(d, qrng);
    NewtonConfig cfg;
    auto w1 = f.vec_in_band(d, q, 1.0 / 625.0);
    auto qa = f.vec_in_band(d, q, 1.0 / 676.0);
    auto qb = f.vec_in_band(d, q, 1.0 / 600.0);

    // Two independent query vectors packed into adjacent n-slot blocks.
    std::vector<double> slots(f.ctx.slot_count(), 0.0);
    for (uint32_t j = 0; j < d; ++j) {
        slots[j] = qa[j];
        slots[n + j] = qb[j];
    }
    auto ct = f.ev.encrypt(slots, f.keys.pub, f.rng);

    auto rec = make_enrollment("erin", w1, cfg, f.ev, f.keys.pub, f.rng);
    auto enr = prepare_enrollment(f.ev, q, rec, n);
    auto qry = prepare_query(f.ev, q, ct, n, true);
    auto plan = make_plan(1, f.ctx.levels());
    auto out = f.ev.decrypt(score_with_prepared(f.ev, enr, qry, n, plan), f.keys.secret);

    CHECK(std::abs(out[0] - score_approx_plain(w1, qa, q, cfg)) < 5e-3);
    CHECK(std::abs(out[n] - score_approx_plain(w1, qb, q, cfg)) < 5e-3);
}

TEST_CASE("prepared enrollment is reusable across queries") {
    Fixture f(4);
    const uint32_t d = 8, n = 8;
    auto q = ProjectionMatrix::identity(d);
    NewtonConfig cfg;
    auto w1 = f.vec_in_band(d, q, 1.0 / 625.0);
    auto rec = make_enrollment("frank", w1, cfg, f.ev, f.keys.pub, f.rng);
    auto enr = prepare_enrollment(f.ev, q, rec, n);
    auto plan = make_plan(1, f.ctx.levels());
    for (int t = 0; t < 2; ++t) {
        auto w2 = f.vec_in_band(d, q, 1.0 / (625.0 + 50.0 * t));
        auto ct = f.ev.encrypt(w2, f.keys.pub, f.rng);
        auto qry = prepare_query(f.ev, q, ct, n, false);
        double got = f.ev.decrypt(score_with_prepared(f.ev, enr, qry, n, plan), f.keys.secret)[0];
        CHECK(std::abs(got - score_approx_plain(w1, w2, q, cfg)) < 5e-3);
    }
}
