// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hevf/score.hpp"

namespace hevf {

struct CorpusSpec {
    uint32_t speakers = 151;
    uint32_t tests_per_speaker = 2;
    uint32_t dim = 16;
    // Speaker means share a global bias direction; larger bias raises
    // imposter scores, more within-speaker noise raises FRR.
    double bias = 0.35;
    double within_noise = 0.20;
    // Feature norms are log-normal around sqrt(dim), i.e. coordinates are
    // O(1) like a trained front-end emits. The projection matrix carries
    // the scale that places w^T Q w in the Newton operating band; see
    // corpus_matched_q.
    double norm_median = 4.0;  // sqrt(dim) for the default dim
    double norm_sigma_ln = 0.08;
};

struct SyntheticCorpus {
    CorpusSpec spec;
    uint64_t seed = 0;
    std::vector<std::vector<double>> enroll;              // [speaker][dim]
    std::vector<std::vector<std::vector<double>>> tests;  // [speaker][trial][dim]
};

SyntheticCorpus gen_corpus(const CorpusSpec& spec, uint64_t seed);

// Scaled identity Q calibrated to the corpus norm scale: a median-norm
// vector gets w^T Q w = 1/650, centering 1/sqrt(a) in the [400, 900]
// initialisation band.
ProjectionMatrix corpus_matched_q(const CorpusSpec& spec);
void save_corpus(const SyntheticCorpus& c, const std::string& path);
SyntheticCorpus load_corpus(const std::string& path);

enum class ScorerKind { baseline, approx, encrypted };

struct ScorerConfig {
    ScorerKind kind = ScorerKind::baseline;
    NewtonConfig newton;            // approx / encrypted
    ParameterSet params;            // encrypted only
    uint64_t seed = 1;              // encryption randomness
};

struct TrialScores {
    std::vector<double> genuine;
    std::vector<double> imposter;
};

TrialScores run_trials(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                       const ScorerConfig& scorer);

struct EvalReport {
    std::vector<double> thresholds;
    std::vector<double> far, frr, accuracy;
    double eer = 0.0;
    double eer_threshold = 0.0;
};

EvalReport compute_eer(const std::vector<double>& genuine, const std::vector<double>& imposter,
                       size_t grid_points = 1001);

struct AttackReport {
    double theta = 0.0;          // EER threshold of the honest system
    double attack_far = 0.0;     // attacks accepted at theta
    double baseline_far = 0.0;   // honest imposters accepted at theta
    size_t attempts = 0;
};

AttackReport attack_random(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                           const NewtonConfig& cfg, uint64_t seed);
AttackReport attack_patterned(const SyntheticCorpus& corpus, const ProjectionMatrix& q,
                              const NewtonConfig& cfg);

struct BenchReport {
    std::string preset;
    uint32_t dim = 0;
    double keygen_s = 0.0;
    double enroll_s = 0.0;
    double verify_s = 0.0;
    double decrypt_s = 0.0;

    std::string table() const;
};

BenchReport bench(const ParameterSet& params, uint32_t dim, uint32_t repetitions, uint32_t iterations = 1,
                  uint64_t seed = 1);

// Extra rotation steps the batched encrypted scorer wants (block tiling).
std::vector<uint32_t> batch_rotation_steps(uint32_t slot_count, uint32_t block);

}  // namespace hevf
