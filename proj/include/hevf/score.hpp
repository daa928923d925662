// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "hevf/newton.hpp"

namespace hevf {

// Level budget of the approximate-score circuit, with the per-stage
// decomposition used by the plan report.
struct ScoreStage {
    std::string name;
    uint32_t level_before = 0;
    uint32_t level_after = 0;
};

struct ScoreCircuitPlan {
    uint32_t iterations = 1;
    uint32_t required_levels = 4;
    std::vector<ScoreStage> stages;

    std::string report() const;
};

// Throws param_error when the parameter set cannot host the circuit.
ScoreCircuitPlan make_plan(uint32_t iterations, uint32_t available_levels);

// What the server stores per user: the two scaled enrollment ciphertexts
// and the public initialisation constant.
struct EnrollmentRecord {
    std::string user_id;
    Ciphertext ct_a;  // 1.5 x0 w1
    Ciphertext ct_b;  // 0.5 x0^3 w1
    double x0 = 650.0;
    uint32_t dim = 0;
    uint64_t params_hash = 0;
};

// Client-side: build the enrollment payload from a plaintext feature vector.
EnrollmentRecord make_enrollment(const std::string& user_id, const std::vector<double>& w1,
                                 const NewtonConfig& cfg, const Evaluator& ev, const PublicKey& pk,
                                 Rng& rng);

// Server-side precomputation reusable across many verifications.
// All constant foldings use only public values (x0, Q).
struct PreparedEnrollment {
    Ciphertext u;   // w1^T Q, periodic, level L-1
    Ciphertext d2;  // 0.5 x0^2 (w1^T Q w1) in every slot, level L-2
    double x0 = 0.0;
};

struct PreparedQuery {
    Ciphertext w_dropped;  // query vector at level L-1
    Ciphertext d4;         // w2^T Q w2 at block-start slots, level L-2
};

PreparedEnrollment prepare_enrollment(const Evaluator& ev, const ProjectionMatrix& q,
                                      const EnrollmentRecord& rec, uint32_t n);

// multi_block: the ciphertext carries several independent n-slot query
// vectors (one score per block-start slot) instead of one tiled vector.
PreparedQuery prepare_query(const Evaluator& ev, const ProjectionMatrix& q, const Ciphertext& w2,
                            uint32_t n, bool multi_block);

// Core circuit on prepared halves; consumes exactly plan.required_levels.
Ciphertext score_with_prepared(const Evaluator& ev, const PreparedEnrollment& enr,
                               const PreparedQuery& qry, uint32_t n, const ScoreCircuitPlan& plan);

// One-shot path: full circuit for a single enrollment/query pair.
Ciphertext score_encrypted(const Evaluator& ev, const EnrollmentRecord& rec, const Ciphertext& w2,
                           const ProjectionMatrix& q, const ScoreCircuitPlan& plan);

namespace linalg {
// Block-cyclic matvec for multi-block inputs: each diagonal is applied as
// two masked rotations so block contents never mix. Consumes one level.
Ciphertext matvec_diag_blocks(const Evaluator& ev, const ProjectionMatrix& q, const Ciphertext& w,
                              uint32_t n, double diag_scale = 1.0);
}  // namespace linalg

}  // namespace hevf
