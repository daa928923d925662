// SPDX-License-Identifier: Apache-2.0
#include "hevf/score.hpp"

#include <cmath>
#include <sstream>

namespace hevf {

namespace {

// Rescale-and-retarget: multiply by a constant plaintext chosen so the
// result lands exactly at (level-1, target scale after remaining steps).
// Used to bring the linear term to the final (level, scale) with the public
// factor folded in, consuming only already-budgeted levels.
Ciphertext fold_align(const Evaluator& ev, const Ciphertext& ct, double factor, uint32_t target_level,
                      double target_scale) {
    const auto& mods = ev.context().key_moduli();
    Ciphertext cur = ct;
    bool first = true;
    while (cur.level > target_level) {
        double q_drop = double(mods[cur.level].value);
        double plain_scale;
        double value = first ? factor : 1.0;
        if (cur.level - 1 == target_level) {
            plain_scale = target_scale * q_drop / cur.scale;
        } else {
            plain_scale = q_drop;  // scale-neutral intermediate step
        }
        std::vector<double> v(ev.context().slot_count(), value);
        cur = ev.rescale(ev.mul_plain(cur, v, plain_scale));
        first = false;
    }
    return cur;
}

}  // namespace

std::string ScoreCircuitPlan::report() const {
    std::ostringstream os;
    os << "score circuit, " << iterations << " iteration" << (iterations > 1 ? "s" : "") << ", "
       << required_levels << " levels\n";
    for (const auto& s : stages)
        os << "  " << s.name << ": level " << s.level_before << " -> " << s.level_after << "\n";
    return os.str();
}

ScoreCircuitPlan make_plan(uint32_t iterations, uint32_t available_levels) {
    if (iterations < 1 || iterations > 2)
        throw param_error("plan: iterations must be 1 or 2 (got " + std::to_string(iterations) + ")");
    ScoreCircuitPlan plan;
    plan.iterations = iterations;
    plan.required_levels = iterations == 1 ? 4 : 6;
    if (available_levels < plan.required_levels)
        throw param_error("plan: circuit requires " + std::to_string(plan.required_levels) +
                          " levels but the parameter set provides " + std::to_string(available_levels));
    uint32_t L = available_levels;
    plan.stages.push_back({"L1 diagonal matvec (w^T Q, three products)", L, L - 1});
    plan.stages.push_back({"L2 rotate-sum dot products", L - 1, L - 2});
    if (iterations == 1) {
        plan.stages.push_back({"L3 denominator product 0.5 x0^2 a", L - 2, L - 3});
        plan.stages.push_back({"L4 numerator product and subtraction", L - 3, L - 4});
    } else {
        plan.stages.push_back({"L3 denominator product and first Newton step", L - 2, L - 3});
        plan.stages.push_back({"L4 squares y^2, y*num, a*num", L - 3, L - 4});
        plan.stages.push_back({"L5 cube y^3", L - 4, L - 5});
        plan.stages.push_back({"L6 final product and subtraction", L - 5, L - 6});
    }
    return plan;
}

EnrollmentRecord make_enrollment(const std::string& user_id, const std::vector<double>& w1,
                                 const NewtonConfig& cfg, const Evaluator& ev, const PublicKey& pk,
                                 Rng& rng) {
    check_newton_config(cfg);
    if (w1.empty()) throw param_error("enrollment: empty feature vector");
    EnrollmentRecord rec;
    rec.user_id = user_id;
    rec.x0 = cfg.x0;
    rec.dim = uint32_t(w1.size());
    rec.params_hash = ev.context().hash();
    std::vector<double> a(w1), b(w1);
    const double x0 = cfg.x0;
    for (auto& v : a) v *= 1.5 * x0;
    for (auto& v : b) v *= 0.5 * x0 * x0 * x0;
    rec.ct_a = ev.encrypt(a, pk, rng);
    rec.ct_b = ev.encrypt(b, pk, rng);
    return rec;
}

namespace linalg {

Ciphertext matvec_diag_blocks(const Evaluator& ev, const ProjectionMatrix& q, const Ciphertext& w,
                              uint32_t n, double diag_scale) {
    if (q.padded_dim() > n) throw param_error("matvec: matrix dimension exceeds block size");
    if (w.level < 1) throw param_error("level exhausted: matvec needs at least one level");
    const auto& ctx = ev.context();
    const uint32_t slots = ctx.slot_count();
    const double plain_scale = ctx.params().delta();

    Ciphertext cur_l = w;          // rot(w, k)
    Ciphertext cur_r;              // rot(w, slots - n + k)
    bool have_r = false;
    Ciphertext acc;
    bool have = false;
    std::vector<double> diag(slots);

    auto add_term = [&](const Ciphertext& rot, uint32_t k, bool tail) {
        // tail=false: slots with (j mod n) < n-k; tail=true: the complement,
        // fed by the right-rotated copy that wraps the block.
        bool all_zero = true;
        for (uint32_t j = 0; j < slots; ++j) {
            uint32_t jb = j % n;
            uint32_t col = (jb + k) % n;
            bool in_part = tail ? (jb >= n - k) : (jb < n - k);
            double v = (in_part && jb < q.dim() && col < q.dim()) ? q.entry(jb, col) * diag_scale : 0.0;
            diag[j] = v;
            all_zero &= (v == 0.0);
        }
        if (all_zero) return;
        Ciphertext term = ev.mul_plain(rot, diag, plain_scale);
        if (!have) {
            acc = std::move(term);
            have = true;
        } else {
            acc = ev.add(acc, term);
        }
    };

    for (uint32_t k = 0; k < n; ++k) {
        if (k > 0) cur_l = ev.rotate(cur_l, 1);
        add_term(cur_l, k, false);
        if (k > 0) {
            // Lazily build the wrap chain only when a tail diagonal is live.
            bool tail_live = false;
            for (uint32_t jb = n - k; jb < n && !tail_live; ++jb)
                tail_live = jb < q.dim() && (jb + k) % n < q.dim() && q.entry(jb, (jb + k) % n) != 0.0;
            if (tail_live) {
                if (!have_r) {
                    cur_r = ev.rotate(w, slots - n + k);
                    have_r = true;
                } else {
                    cur_r = ev.rotate(cur_r, 1);
                }
                add_term(cur_r, k, true);
            } else if (have_r) {
                cur_r = ev.rotate(cur_r, 1);
            }
        }
    }
    if (!have) throw param_error("matvec: zero matrix");
    return ev.rescale(acc);
}

}  // namespace linalg

PreparedEnrollment prepare_enrollment(const Evaluator& ev, const ProjectionMatrix& q,
                                      const EnrollmentRecord& rec, uint32_t n) {
    const double x0 = rec.x0;
    Ciphertext a = linalg::extend_periodic(ev, rec.ct_a, n);
    Ciphertext b = linalg::extend_periodic(ev, rec.ct_b, n);

    PreparedEnrollment out;
    out.x0 = x0;
    // Foldings are balanced so every plaintext constant encodes with
    // plenty of mantissa at small delta: tiny compound factors like
    // 1/(1.5 x0^2) quantize catastrophically when baked into a single
    // diagonal, so the 1/x0 pieces ride on separate multiplications.
    // u = (x0/1.5) * [1.5 x0 w1]^T Q = x0^2 w1^T Q
    out.u = linalg::matvec_diag(ev, q, a, n, x0 / 1.5, false);
    // bm = (1/(1.5 x0)) * [0.5 x0^3 w1]^T Q; paired with a/x0 = 1.5 w1
    // the dot yields 0.5 x0^2 (w1^T Q w1), keeping every intermediate of
    // the circuit near unit magnitude.
    Ciphertext bm = linalg::matvec_diag(ev, q, b, n, 1.0 / (1.5 * x0), false);
    std::vector<double> inv_x0(ev.context().slot_count(), 1.0 / x0);
    Ciphertext a_scaled = ev.rescale(ev.mul_plain(a, inv_x0));
    out.d2 = linalg::dot_core(ev, bm, a_scaled, n);
    return out;
}

PreparedQuery prepare_query(const Evaluator& ev, const ProjectionMatrix& q, const Ciphertext& w2,
                            uint32_t n, bool multi_block) {
    PreparedQuery out;
    Ciphertext w = multi_block ? w2 : linalg::extend_periodic(ev, w2, n);
    Ciphertext c = multi_block ? linalg::matvec_diag_blocks(ev, q, w, n)
                               : linalg::matvec_diag(ev, q, w, n, 1.0, false);
    out.w_dropped = ev.mod_drop_to(w, c.level);
    out.d4 = linalg::dot_core(ev, c, out.w_dropped, n);
    return out;
}

Ciphertext score_with_prepared(const Evaluator& ev, const PreparedEnrollment& enr,
                               const PreparedQuery& qry, uint32_t n, const ScoreCircuitPlan& plan) {
    const uint32_t L = ev.context().levels();
    if (L < plan.required_levels)
        throw param_error("plan: circuit requires " + std::to_string(plan.required_levels) +
                          " levels but the parameter set provides " + std::to_string(L));

    // d3 = x0^2 w1^T Q w2 at block starts, level L-2.
    Ciphertext d3 = linalg::dot_core(ev, enr.u, qry.w_dropped, n);
    // c3 = x0 * num, level L-3.
    std::vector<double> inv_x0(ev.context().slot_count(), 1.0 / enr.x0);
    Ciphertext c3 = ev.rescale(ev.mul_plain(d3, inv_x0));

    if (plan.iterations == 1) {
        // e = 0.5 x0^2 a, level L-3.
        Ciphertext e = ev.rescale(ev.mul(enr.d2, qry.d4));
        // f = 0.5 x0^3 a num, level L-4.
        Ciphertext f = ev.rescale(ev.mul(e, c3));
        // term1 = 1.5 x0 num, aligned to f.
        Ciphertext t = fold_align(ev, c3, 1.5, f.level, f.scale);
        return ev.sub(t, f);
    }

    // Two iterations. h = 0.5 x0^2 a, level L-3.
    Ciphertext h = ev.rescale(ev.mul(enr.d2, qry.d4));
    // y = x1/x0 = 1.5 - h, level L-3.
    std::vector<double> c15(ev.context().slot_count(), 1.5);
    Ciphertext y = ev.add_plain(ev.negate(h), c15);
    // Level L-4 products.
    Ciphertext p = ev.rescale(ev.mul(y, y));                         // y^2
    Ciphertext qn = ev.rescale(ev.mul(h, c3));                       // 0.5 x0^3 a num
    Ciphertext s = ev.rescale(ev.mul(y, ev.mod_drop_to(c3, y.level)));  // y x0 num
    // r = y^3, level L-5.
    Ciphertext r = ev.rescale(ev.mul(p, ev.mod_drop_to(y, p.level)));
    // term2 = y^3 * 0.5 x0^3 a num = 0.5 a x1^3 num, level L-6.
    Ciphertext tb = ev.rescale(ev.mul(r, ev.mod_drop_to(qn, r.level)));
    // term1 = 1.5 x1 num = 1.5 * s, aligned to tb.
    Ciphertext ta = fold_align(ev, s, 1.5, tb.level, tb.scale);
    return ev.sub(ta, tb);
}

Ciphertext score_encrypted(const Evaluator& ev, const EnrollmentRecord& rec, const Ciphertext& w2,
                           const ProjectionMatrix& q, const ScoreCircuitPlan& plan) {
    if (rec.params_hash != ev.context().hash())
        throw crypto_error("enrollment record from a different parameter set");
    if (q.dim() != rec.dim) throw param_error("score: matrix/enrollment dimension mismatch");
    uint32_t n = next_pow2(rec.dim);
    PreparedEnrollment enr = prepare_enrollment(ev, q, rec, n);
    PreparedQuery qry = prepare_query(ev, q, w2, n, false);
    return score_with_prepared(ev, enr, qry, n, plan);
}

}  // namespace hevf
