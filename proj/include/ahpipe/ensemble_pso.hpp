#pragma once

#include <cstdint>
#include <vector>

#include "ahpipe/committee.hpp"

namespace ahpipe {

// Voting weights in canonical combination order (mask 1..15 for a full
// committee); each entry lives in [0, 1].
using WeightVector = std::vector<double>;

struct PsoConfig {
    int particles = 50;
    int epochs = 100;
    double inertia = 0.9;
    double cognitive = 1.5;  // c1
    double social = 2.1;     // c2
    double lambda = 0.0;
    uint64_t seed = 0;
    double velocity_clamp = 0.2;

    void validate() const;
};

struct FitnessReport {
    double f1_train = 0.0;
    double f1_val = 0.0;
    double harmonic_mean = 0.0;
    double penalty = 0.0;
    double fitness = 0.0;
};

struct PsoResult {
    WeightVector best_weights;
    double best_fitness = 0.0;
    int best_epoch = 0;                 // 0 = initialization, e = after epoch e
    std::vector<double> fitness_trace;  // global best after each epoch; non-decreasing
    FitnessReport best_report;
    int zero_weight_count = 0;
    double lambda = 0.0;
    uint64_t seed = 0;
};

// Weighted hard vote: predict 1 iff sum(w_i * vote_i) strictly exceeds half
// the total weight pool; an exact tie predicts 0.
int hard_vote(const std::vector<uint8_t>& votes, const WeightVector& w);
std::vector<int> hard_vote_all(const VoteMatrix& votes, const WeightVector& w);
// Weighted vote share in [0, 1]; the ensemble's probability-like score.
std::vector<double> vote_share(const VoteMatrix& votes, const WeightVector& w);

// harmonic_mean(f1_train, f1_val) - (lambda * |f1_train - f1_val|)^2;
// defined as 0 when both F1 values are 0.
FitnessReport fitness(double f1_train, double f1_val, double lambda);

FitnessReport evaluate_weights(const WeightVector& w, const VoteMatrix& votes_train,
                               const VoteMatrix& votes_val, const std::vector<int>& labels_train,
                               const std::vector<int>& labels_val, double lambda);

// Swarm over [0,1]^m (m = vote matrix rows): uniform position init, zero
// velocities, per-dimension r1/r2, velocity clamped to +-velocity_clamp,
// positions clamped to the box. Each particle draws from its own RNG stream
// derived from the seed, and personal/global bests are updated at a fixed
// epoch barrier, so results are bit-identical for any thread count.
PsoResult pso_optimize(const VoteMatrix& votes_train, const VoteMatrix& votes_val,
                       const std::vector<int>& labels_train, const std::vector<int>& labels_val,
                       const PsoConfig& cfg, int threads = 1);

// Independent runs with per-lambda derived seeds (base seed + index).
std::vector<PsoResult> lambda_sweep(const VoteMatrix& votes_train, const VoteMatrix& votes_val,
                                    const std::vector<int>& labels_train,
                                    const std::vector<int>& labels_val, const PsoConfig& base_cfg,
                                    const std::vector<double>& lambdas, int threads = 1);

}  // namespace ahpipe
