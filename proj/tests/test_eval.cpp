// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>

#include "hevf/eval.hpp"

using namespace hevf;

namespace {

CorpusSpec small_spec() {
    CorpusSpec s;
    s.speakers = 6;
    s.tests_per_speaker = 2;
    s.dim = 8;
    return s;
}

ParameterSet toy_params(uint32_t levels = 4) {
    ParameterSet p;
    p.name = "toy";
    p.degree = 2048;
    p.levels = levels;
    p.delta_bits = 40;
    p.chain_bits.assign(levels + 2, 40);
    p.chain_bits.front() = 50;
    p.chain_bits.back() = 50;
    p.security_bits = 0;
    return p;
}

// Brute-force EER: sweep every observed score as a threshold and take the
// point where |FAR - FRR| is smallest.
double eer_oracle(std::vector<double> g, std::vector<double> im) {
    std::vector<double> cand = g;
    cand.insert(cand.end(), im.begin(), im.end());
    double best_gap = 1e9, best = 0.5;
    for (double th : cand) {
        double fa = 0.0, fr = 0.0;
        for (double s : im) fa += s >= th;
        for (double s : g) fr += s < th;
        fa /= double(im.size());
        fr /= double(g.size());
        if (std::abs(fa - fr) < best_gap) {
            best_gap = std::abs(fa - fr);
            best = 0.5 * (fa + fr);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("corpus generation is deterministic per seed") {
    auto spec = small_spec();
    auto a = gen_corpus(spec, 7);
    auto b = gen_corpus(spec, 7);
    auto c = gen_corpus(spec, 8);
    CHECK(a.enroll == b.enroll);
    CHECK(a.tests == b.tests);
    CHECK(a.enroll != c.enroll);
    CHECK(a.enroll.size() == 6);
    CHECK(a.tests[0].size() == 2);
}

TEST_CASE("corpus norms sit in the calibrated band") {
    auto spec = small_spec();
    auto corpus = gen_corpus(spec, 3);
    auto q = corpus_matched_q(spec);
    for (const auto& v : corpus.enroll) {
        double inv = 1.0 / quadratic_form(v, v, q);  // 1/(w^T Q w)
        CHECK(inv > 400.0);
        CHECK(inv < 1000.0);
    }
}

TEST_CASE("corpus file roundtrip") {
    auto corpus = gen_corpus(small_spec(), 11);
    std::string path = "eval_corpus_tmp_" + std::to_string(::getpid()) + ".txt";
    save_corpus(corpus, path);
    auto loaded = load_corpus(path);
    std::remove(path.c_str());
    CHECK(loaded.seed == corpus.seed);
    CHECK(loaded.spec.speakers == corpus.spec.speakers);
    REQUIRE(loaded.enroll.size() == corpus.enroll.size());
    for (size_t s = 0; s < corpus.enroll.size(); ++s)
        for (size_t i = 0; i < corpus.enroll[s].size(); ++i)
            CHECK(loaded.enroll[s][i] == doctest::Approx(corpus.enroll[s][i]).epsilon(1e-15));
    CHECK_THROWS_AS(load_corpus("no_such_corpus_file.txt"), io_error);
}

TEST_CASE("trial counts cover the full cross product") {
    auto corpus = gen_corpus(small_spec(), 5);
    auto q = corpus_matched_q(corpus.spec);
    ScorerConfig sc;
    auto ts = run_trials(corpus, q, sc);
    CHECK(ts.genuine.size() == 6 * 2);
    CHECK(ts.imposter.size() == 6 * 5 * 2);
}

TEST_CASE("compute_eer matches a brute-force sweep") {
    Rng rng(42);
    std::vector<double> g(300), im(900);
    for (auto& x : g) x = 0.6 + 0.25 * rng.gaussian();
    for (auto& x : im) x = 0.0 + 0.25 * rng.gaussian();
    auto rep = compute_eer(g, im, 4001);
    double oracle = eer_oracle(g, im);
    CHECK(std::abs(rep.eer - oracle) < 0.01);
    // At the reported threshold FAR and FRR agree by construction.
    double fa = 0.0, fr = 0.0;
    for (double s : im) fa += s >= rep.eer_threshold;
    for (double s : g) fr += s < rep.eer_threshold;
    CHECK(std::abs(fa / 900.0 - fr / 300.0) < 0.02);
}

TEST_CASE("compute_eer extremes") {
    std::vector<double> g = {0.9, 0.8, 0.95};
    std::vector<double> im = {0.1, 0.2, 0.05};
    CHECK(compute_eer(g, im).eer < 1e-9);  // perfect separation
    auto same = compute_eer(g, g);
    CHECK(same.eer > 0.3);  // indistinguishable distributions
    CHECK_THROWS_AS(compute_eer({}, im), param_error);
}

TEST_CASE("approximate scorer tracks the baseline on a corpus") {
    auto corpus = gen_corpus(small_spec(), 21);
    auto q = corpus_matched_q(corpus.spec);
    ScorerConfig base;
    ScorerConfig approx;
    approx.kind = ScorerKind::approx;
    approx.newton.iterations = 2;
    auto tb = run_trials(corpus, q, base);
    auto ta = run_trials(corpus, q, approx);
    REQUIRE(ta.genuine.size() == tb.genuine.size());
    for (size_t i = 0; i < ta.genuine.size(); ++i)
        CHECK(std::abs(ta.genuine[i] - tb.genuine[i]) < 0.05);
}

TEST_CASE("encrypted scorer matches the approximate scorer") {
    auto spec = small_spec();
    spec.speakers = 3;
    spec.tests_per_speaker = 1;
    auto corpus = gen_corpus(spec, 13);
    auto q = corpus_matched_q(spec);

    ScorerConfig approx;
    approx.kind = ScorerKind::approx;
    ScorerConfig enc;
    enc.kind = ScorerKind::encrypted;
    enc.params = toy_params();
    enc.seed = 99;

    auto ta = run_trials(corpus, q, approx);
    auto te = run_trials(corpus, q, enc);
    REQUIRE(te.genuine.size() == ta.genuine.size());
    REQUIRE(te.imposter.size() == ta.imposter.size());
    for (size_t i = 0; i < ta.genuine.size(); ++i)
        CHECK(std::abs(te.genuine[i] - ta.genuine[i]) < 5e-3);
    for (size_t i = 0; i < ta.imposter.size(); ++i)
        CHECK(std::abs(te.imposter[i] - ta.imposter[i]) < 5e-3);
}

TEST_CASE("attack simulations report a threshold and rates") {
    auto corpus = gen_corpus(small_spec(), 31);
    auto q = corpus_matched_q(corpus.spec);
    NewtonConfig cfg;
    auto ra = attack_random(corpus, q, cfg, 77);
    CHECK(ra.attempts == corpus.spec.speakers * corpus.spec.tests_per_speaker * 2);
    // Unit-norm probes fall below the calibrated norm band, so the Newton
    // factor undershoots and shrinks their scores toward zero.
    CHECK(ra.attack_far <= ra.baseline_far);
    auto rp = attack_patterned(corpus, q, cfg);
    CHECK(rp.attempts == corpus.spec.speakers);
    CHECK(rp.attack_far <= 0.5);
    CHECK(rp.theta == ra.theta);
}

TEST_CASE("batch rotation steps") {
    auto steps = batch_rotation_steps(1024, 8);
    REQUIRE(steps.size() == 7);
    CHECK(steps.front() == 1024 - 8);
    CHECK(steps.back() == 512);
}

TEST_CASE("bench produces timings and a table") {
    auto rep = bench(toy_params(), 8, 1);
    CHECK(rep.keygen_s > 0.0);
    CHECK(rep.verify_s > 0.0);
    CHECK(rep.table().find("Veri.") != std::string::npos);
}
