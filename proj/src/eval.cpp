// SPDX-License-Identifier: Apache-2.0
#include "hevf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hevf {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
    double n = norm2(v);
    if (n == 0.0) throw param_error("corpus: degenerate zero vector");
    for (double& x : v) x /= n;
}

std::vector<double> random_unit(uint32_t d, Rng& rng) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.gaussian();
    normalize(v);
    return v;
}

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SyntheticCorpus gen_corpus(const CorpusSpec& spec, uint64_t seed) {
    if (spec.speakers < 2 || spec.tests_per_speaker < 1 || spec.dim < 2)
        throw param_error("corpus: need speakers >= 2, tests >= 1, dim >= 2");
    if (!(spec.bias >= 0.0 && spec.bias < 1.0) || !(spec.within_noise > 0.0))
        throw param_error("corpus: bias in [0,1), positive within-speaker noise");

    SyntheticCorpus c;
    c.spec = spec;
    c.seed = seed;
    Rng root(seed);
    std::vector<double> g = random_unit(spec.dim, root);

    auto sample = [&](const std::vector<double>& mean, Rng& rng) {
        std::vector<double> v(spec.dim);
        for (uint32_t i = 0; i < spec.dim; ++i) v[i] = mean[i] + spec.within_noise * rng.gaussian();
        normalize(v);
        double norm = spec.norm_median * std::exp(spec.norm_sigma_ln * rng.gaussian());
        for (double& x : v) x *= norm;
        return v;
    };

    c.enroll.resize(spec.speakers);
    c.tests.resize(spec.speakers);
    for (uint32_t s = 0; s < spec.speakers; ++s) {
        Rng rng = root.spawn(s + 1);
        std::vector<double> eps = random_unit(spec.dim, rng);
        std::vector<double> mean(spec.dim);
        double w = std::sqrt(1.0 - spec.bias * spec.bias);
        for (uint32_t i = 0; i < spec.dim; ++i) mean[i] = spec.bias * g[i] + w * eps[i];
        normalize(mean);

        c.enroll[s] = sample(mean, rng);
        c.tests[s].resize(spec.tests_per_speaker);
        for (uint32_t t = 0; t < spec.tests_per_speaker; ++t) c.tests[s][t] = sample(mean, rng);
    }
    return c;
}

ProjectionMatrix corpus_matched_q(const CorpusSpec& spec) {
    double s = 1.0 / (650.0 * spec.norm_median * spec.norm_median);
    std::vector<std::vector<double>> e(spec.dim, std::vector<double>(spec.dim, 0.0));
    for (uint32_t i = 0; i < spec.dim; ++i) e[i][i] = s;
    return ProjectionMatrix(std::move(e));
}

void save_corpus(const SyntheticCorpus& c, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + path);
    f.precision(17);
    f << "hevf-corpus 1 " << c.spec.speakers << " " << c.spec.tests_per_speaker << " " << c.spec.dim
      << " " << c.seed << "\n";
    auto line = [&](const std::vector<double>& v) {
        for (size_t i = 0; i < v.size(); ++i) f << (i ? " " : "") << v[i];
        f << "\n";
    };
    for (const auto& v : c.enroll) line(v);
    for (const auto& per : c.tests)
        for (const auto& v : per) line(v);
    if (!f) throw io_error("write failed: " + path);
}

SyntheticCorpus load_corpus(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open: " + path);
    std::string tag;
    int ver = 0;
    SyntheticCorpus c;
    f >> tag >> ver >> c.spec.speakers >> c.spec.tests_per_speaker >> c.spec.dim >> c.seed;
    if (tag != "hevf-corpus" || ver != 1) throw io_error("not a corpus file: " + path);
    auto read_vec = [&] {
        std::vector<double> v(c.spec.dim);
        for (double& x : v)
            if (!(f >> x)) throw io_error("truncated corpus file: " + path);
        return v;
    };
    c.enroll.resize(c.spec.speakers);
    for (auto& v : c.enroll) v = read_vec();
    c.tests.resize(c.spec.speakers);
    for (auto& per : c.tests) {
        per.resize(c.spec.tests_per_speaker);
        for (auto& v : per) v = read_vec();
    }
    return c;
}

std::vector<uint32_t> batch_rotation_steps(uint32_t slot_count, uint32_t block) {
    std::vector<uint32_t> steps;
    for (uint32_t filled = block; filled < slot_count; filled <<= 1) steps.push_back(slot_count - filled);
    return steps;
}

namespace {

// All scores for the full cross product enrollee x test vector, encrypted
// path. Batches every test vector into block-packed ciphertexts so one
// circuit evaluation scores one enrollee against many tests at once.
std::vector<std::vector<double>> encrypted_score_matrix(const SyntheticCorpus& corpus,
                                                        const ProjectionMatrix& q,
                                                        const ScorerConfig& sc) {
    const uint32_t S = corpus.spec.speakers;
    const uint32_t T = corpus.spec.tests_per_speaker;
    const uint32_t d = corpus.spec.dim;
    const uint32_t n = next_pow2(d);

    ParamContext ctx(sc.params);
    const uint32_t slots = ctx.slot_count();
    const uint32_t blocks_per_ct = slots / n;

    std::vector<uint32_t> steps = default_rotation_steps(ctx);
    for (uint32_t s : batch_rotation_steps(slots, n)) steps.push_back(s);
    Rng rng(sc.seed);
    KeyBundle keys = keygen(ctx, rng, steps);
    Evaluator ev(ctx, &keys.relin, &keys.galois);
    ScoreCircuitPlan plan = make_plan(sc.newton.iterations, ctx.levels());

    // Flatten the test set, then chunk it into multi-block ciphertexts.
    std::vector<const std::vector<double>*> tests;
    tests.reserve(size_t(S) * T);
    for (uint32_t s = 0; s < S; ++s)
        for (uint32_t t = 0; t < T; ++t) tests.push_back(&corpus.tests[s][t]);

    std::vector<PreparedQuery> queries;
    for (size_t base = 0; base < tests.size(); base += blocks_per_ct) {
        size_t count = std::min<size_t>(blocks_per_ct, tests.size() - base);
        std::vector<double> packed(slots, 0.0);
        for (size_t b = 0; b < count; ++b)
            for (uint32_t i = 0; i < d; ++i) packed[b * n + i] = (*tests[base + b])[i];
        Ciphertext w2 = ev.encrypt(packed, keys.pub, rng);
        queries.push_back(prepare_query(ev, q, w2, n, true));
    }

    std::vector<std::vector<double>> scores(S, std::vector<double>(tests.size(), 0.0));
    for (uint32_t s = 0; s < S; ++s) {
        EnrollmentRecord rec = make_enrollment("spk" + std::to_string(s), corpus.enroll[s], sc.newton,
                                               ev, keys.pub, rng);
        PreparedEnrollment enr = prepare_enrollment(ev, q, rec, n);
        for (size_t c = 0; c < queries.size(); ++c) {
            Ciphertext out = score_with_prepared(ev, enr, queries[c], n, plan);
            std::vector<double> slots_out = ev.decrypt(out, keys.secret);
            size_t base = c * blocks_per_ct;
            size_t count = std::min<size_t>(blocks_per_ct, tests.size() - base);
            for (size_t b = 0; b < count; ++b) scores[s][base + b] = slots_out[b * n];
        }
    }
    return scores;
}

}  // namespace

TrialScores run_trials(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                       const ScorerConfig& scorer) {
    const uint32_t S = corpus.spec.speakers;
    const uint32_t T = corpus.spec.tests_per_speaker;
    if (q.dim() != corpus.spec.dim) throw param_error("trials: matrix/corpus dimension mismatch");

    TrialScores out;
    out.genuine.reserve(size_t(S) * T);
    out.imposter.reserve(size_t(S) * (S - 1) * T);

    if (scorer.kind == ScorerKind::encrypted) {
        auto scores = encrypted_score_matrix(corpus, q, scorer);
        for (uint32_t enrollee = 0; enrollee < S; ++enrollee)
            for (uint32_t spk = 0; spk < S; ++spk)
                for (uint32_t t = 0; t < T; ++t) {
                    double sc = scores[enrollee][size_t(spk) * T + t];
                    (spk == enrollee ? out.genuine : out.imposter).push_back(sc);
                }
        return out;
    }

    auto score = [&](const std::vector<double>& w1, const std::vector<double>& w2) {
        return scorer.kind == ScorerKind::baseline ? cosine_score_plain(w1, w2, q)
                                                   : score_approx_plain(w1, w2, q, scorer.newton);
    };
    for (uint32_t enrollee = 0; enrollee < S; ++enrollee)
        for (uint32_t spk = 0; spk < S; ++spk)
            for (uint32_t t = 0; t < T; ++t) {
                double sc = score(corpus.enroll[enrollee], corpus.tests[spk][t]);
                (spk == enrollee ? out.genuine : out.imposter).push_back(sc);
            }
    return out;
}

EvalReport compute_eer(const std::vector<double>& genuine, const std::vector<double>& imposter,
                       size_t grid_points) {
    if (genuine.empty() || imposter.empty()) throw param_error("eer: empty score list");
    std::vector<double> g = genuine, im = imposter;
    std::sort(g.begin(), g.end());
    std::sort(im.begin(), im.end());

    double lo = std::min(g.front(), im.front());
    double hi = std::max(g.back(), im.back());
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    EvalReport rep;
    rep.thresholds.resize(grid_points);
    rep.far.resize(grid_points);
    rep.frr.resize(grid_points);
    rep.accuracy.resize(grid_points);
    const double ng = double(g.size()), ni = double(im.size());
    for (size_t i = 0; i < grid_points; ++i) {
        double th = lo + (hi - lo) * double(i) / double(grid_points - 1);
        rep.thresholds[i] = th;
        // FAR: imposters at or above the threshold; FRR: genuines below it.
        double fa = double(im.end() - std::lower_bound(im.begin(), im.end(), th));
        double fr = double(std::lower_bound(g.begin(), g.end(), th) - g.begin());
        rep.far[i] = fa / ni;
        rep.frr[i] = fr / ng;
        rep.accuracy[i] = 1.0 - (fa + fr) / (ng + ni);
    }

    // Interpolated FAR/FRR crossing. FAR - FRR is nonincreasing.
    rep.eer = 0.5;
    rep.eer_threshold = rep.thresholds.front();
    for (size_t i = 0; i < grid_points; ++i) {
        double diff = rep.far[i] - rep.frr[i];
        if (diff <= 0.0) {
            if (i == 0) {
                rep.eer = 0.5 * (rep.far[0] + rep.frr[0]);
                rep.eer_threshold = rep.thresholds[0];
            } else {
                double d0 = rep.far[i - 1] - rep.frr[i - 1];
                double frac = d0 / (d0 - diff);
                rep.eer_threshold =
                    rep.thresholds[i - 1] + frac * (rep.thresholds[i] - rep.thresholds[i - 1]);
                double far_x = rep.far[i - 1] + frac * (rep.far[i] - rep.far[i - 1]);
                double frr_x = rep.frr[i - 1] + frac * (rep.frr[i] - rep.frr[i - 1]);
                rep.eer = 0.5 * (far_x + frr_x);
            }
            break;
        }
        if (i + 1 == grid_points) {
            rep.eer = 0.5 * (rep.far[i] + rep.frr[i]);
            rep.eer_threshold = rep.thresholds[i];
        }
    }
    return rep;
}

namespace {

AttackReport run_attack(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                        const NewtonConfig& cfg,
                        const std::vector<std::vector<double>>& attack_vectors) {
    ScorerConfig honest;
    honest.kind = ScorerKind::approx;
    honest.newton = cfg;
    TrialScores ts = run_trials(corpus, q, honest);
    EvalReport rep = compute_eer(ts.genuine, ts.imposter);

    size_t accepted = 0, attempts = 0;
    for (const auto& enr : corpus.enroll)
        for (const auto& av : attack_vectors) {
            ++attempts;
            if (score_approx_plain(enr, av, q, cfg) >= rep.eer_threshold) ++accepted;
        }
    size_t base_acc = 0;
    for (double s : ts.imposter)
        if (s >= rep.eer_threshold) ++base_acc;

    AttackReport out;
    out.theta = rep.eer_threshold;
    out.attack_far = double(accepted) / double(attempts);
    out.baseline_far = double(base_acc) / double(ts.imposter.size());
    out.attempts = attempts;
    return out;
}

}  // namespace

AttackReport attack_random(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                           const NewtonConfig& cfg, uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> attacks(corpus.spec.tests_per_speaker * 2);
    for (auto& v : attacks) v = random_unit(corpus.spec.dim, rng);
    return run_attack(corpus, q, cfg, attacks);
}

AttackReport attack_patterned(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                              const NewtonConfig& cfg) {
    std::vector<std::vector<double>> attacks = {std::vector<double>(corpus.spec.dim, 1.0)};
    return run_attack(corpus, q, cfg, attacks);
}

std::string BenchReport::table() const {
    std::ostringstream os;
    os << "preset " << preset << ", d=" << dim << " (median seconds)\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "  KG     %10.3f\n", keygen_s);
    os << buf;
    std::snprintf(buf, sizeof buf, "  Enrol  %10.3f\n", enroll_s);
    os << buf;
    std::snprintf(buf, sizeof buf, "  Dec.   %10.3f\n", decrypt_s);
    os << buf;
    std::snprintf(buf, sizeof buf, "  Veri.  %10.3f\n", verify_s);
    os << buf;
    return os.str();
}

BenchReport bench(const ParameterSet& params, uint32_t dim, uint32_t repetitions, uint32_t iterations,
                  uint64_t seed) {
    if (repetitions == 0) throw param_error("bench: need at least one repetition");
    ParamContext ctx(params);
    ScoreCircuitPlan plan = make_plan(iterations, ctx.levels());
    ProjectionMatrix q = ProjectionMatrix::identity(dim);
    NewtonConfig cfg;
    Rng rng(seed);

    BenchReport rep;
    rep.preset = params.name;
    rep.dim = dim;

    std::vector<double> t_kg, t_enr, t_ver, t_dec;
    for (uint32_t r = 0; r < repetitions; ++r) {
        double t0 = now_s();
        KeyBundle keys = keygen(ctx, rng);
        t_kg.push_back(now_s() - t0);
        Evaluator ev(ctx, &keys.relin, &keys.galois);

        std::vector<double> w1(dim), w2(dim);
        for (auto& x : w1) x = 2.0 * rng.uniform01() - 1.0;
        for (auto& x : w2) x = 2.0 * rng.uniform01() - 1.0;
        normalize(w1);
        normalize(w2);
        for (auto& x : w1) x *= 0.0392;
        for (auto& x : w2) x *= 0.0392;

        t0 = now_s();
        EnrollmentRecord rec = make_enrollment("bench", w1, cfg, ev, keys.pub, rng);
        t_enr.push_back(now_s() - t0);

        Ciphertext ctw2 = ev.encrypt(w2, keys.pub, rng);
        t0 = now_s();
        Ciphertext score = score_encrypted(ev, rec, ctw2, q, plan);
        t_ver.push_back(now_s() - t0);

        t0 = now_s();
        volatile double sink = ev.decrypt(score, keys.secret)[0];
        (void)sink;
        t_dec.push_back(now_s() - t0);
    }
    rep.keygen_s = median(t_kg);
    rep.enroll_s = median(t_enr);
    rep.verify_s = median(t_ver);
    rep.decrypt_s = median(t_dec);
    return rep;
}

}  // namespace hevf
