#include "ahpipe/ensemble_pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "ahpipe/error.hpp"

namespace ahpipe {

void PsoConfig::validate() const {
    if (particles < 1) throw_data("pso config: particles must be >= 1");
    if (epochs < 1) throw_data("pso config: epochs must be >= 1");
    if (lambda < 0) throw_data("pso config: lambda must be >= 0");
    if (velocity_clamp <= 0) throw_data("pso config: velocity clamp must be positive");
    if (inertia < 0 || cognitive < 0 || social < 0)
        throw_data("pso config: coefficients must be non-negative");
}

int hard_vote(const std::vector<uint8_t>& votes, const WeightVector& w) {
    if (votes.size() != w.size()) throw_data("hard_vote: vote/weight length mismatch");
    double total = 0.0, in_favor = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        total += w[i];
        if (votes[i]) in_favor += w[i];
    }
    if (total <= 0.0) throw_data("unusable ensemble: all weights are zero");
    return in_favor > 0.5 * total ? 1 : 0;
}

std::vector<int> hard_vote_all(const VoteMatrix& votes, const WeightVector& w) {
    if (votes.members != w.size()) throw_data("hard_vote: vote/weight length mismatch");
    double total = 0.0;
    for (double wi : w) total += wi;
    if (total <= 0.0) throw_data("unusable ensemble: all weights are zero");
    const double half = 0.5 * total;
    std::vector<int> out(votes.samples, 0);
    for (size_t j = 0; j < votes.samples; ++j) {
        double in_favor = 0.0;
        for (size_t m = 0; m < votes.members; ++m)
            if (votes.votes[m * votes.samples + j]) in_favor += w[m];
        out[j] = in_favor > half ? 1 : 0;
    }
    return out;
}

std::vector<double> vote_share(const VoteMatrix& votes, const WeightVector& w) {
    if (votes.members != w.size()) throw_data("vote_share: vote/weight length mismatch");
    double total = 0.0;
    for (double wi : w) total += wi;
    if (total <= 0.0) throw_data("unusable ensemble: all weights are zero");
    std::vector<double> out(votes.samples, 0.0);
    for (size_t j = 0; j < votes.samples; ++j) {
        double in_favor = 0.0;
        for (size_t m = 0; m < votes.members; ++m)
            if (votes.votes[m * votes.samples + j]) in_favor += w[m];
        out[j] = in_favor / total;
    }
    return out;
}

FitnessReport fitness(double f1_train, double f1_val, double lambda) {
    if (f1_train < 0 || f1_train > 1 || f1_val < 0 || f1_val > 1)
        throw_data("fitness: F1 inputs must be in [0, 1]");
    if (lambda < 0) throw_data("fitness: lambda must be >= 0");
    FitnessReport r;
    r.f1_train = f1_train;
    r.f1_val = f1_val;
    const double sum = f1_train + f1_val;
    r.harmonic_mean = sum > 0.0 ? 2.0 * f1_val * f1_train / sum : 0.0;
    const double gap = lambda * std::abs(f1_train - f1_val);
    r.penalty = gap * gap;
    r.fitness = r.harmonic_mean - r.penalty;
    return r;
}

FitnessReport evaluate_weights(const WeightVector& w, const VoteMatrix& votes_train,
                               const VoteMatrix& votes_val, const std::vector<int>& labels_train,
                               const std::vector<int>& labels_val, double lambda) {
    std::vector<int> pred_train = hard_vote_all(votes_train, w);
    std::vector<int> pred_val = hard_vote_all(votes_val, w);
    double f1_train = f1_scores(labels_train, pred_train).f1_macro;
    double f1_val = f1_scores(labels_val, pred_val).f1_macro;
    return fitness(f1_train, f1_val, lambda);
}

namespace {

struct Particle {
    WeightVector position;
    WeightVector velocity;
    WeightVector best_position;
    double best_fitness = -std::numeric_limits<double>::infinity();
    double fitness = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng;
};

// All-zero positions are reachable through clamping and carry no usable
// ensemble; they score -inf instead of erroring out of the swarm.
double safe_fitness(const WeightVector& w, const VoteMatrix& vt, const VoteMatrix& vv,
                    const std::vector<int>& lt, const std::vector<int>& lv, double lambda) {
    double total = 0.0;
    for (double wi : w) total += wi;
    if (total <= 0.0) return -std::numeric_limits<double>::infinity();
    return evaluate_weights(w, vt, vv, lt, lv, lambda).fitness;
}

template <typename Fn>
void parallel_over(size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const size_t n_threads = std::min<size_t>(static_cast<size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (size_t i = t; i < count; i += n_threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

PsoResult pso_optimize(const VoteMatrix& votes_train, const VoteMatrix& votes_val,
                       const std::vector<int>& labels_train, const std::vector<int>& labels_val,
                       const PsoConfig& cfg, int threads) {
    cfg.validate();
    if (votes_train.members != votes_val.members)
        throw_data("pso_optimize: train/val vote matrices disagree on member count");
    if (votes_train.samples != labels_train.size() || votes_val.samples != labels_val.size())
        throw_data("pso_optimize: vote matrix does not match label count");
    const size_t dims = votes_train.members;
    if (dims == 0) throw_data("pso_optimize: no committee members");

    std::vector<Particle> swarm(static_cast<size_t>(cfg.particles));
    for (size_t i = 0; i < swarm.size(); ++i) {
        // per-particle RNG stream: the draws are independent of thread interleaving
        std::seed_seq seq{static_cast<uint32_t>(cfg.seed), static_cast<uint32_t>(cfg.seed >> 32),
                          static_cast<uint32_t>(i)};
        swarm[i].rng.seed(seq);
        swarm[i].position.resize(dims);
        swarm[i].velocity.assign(dims, 0.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (size_t d = 0; d < dims; ++d) swarm[i].position[d] = unit(swarm[i].rng);
    }

    // initial evaluation
    parallel_over(swarm.size(), threads, [&](size_t i) {
        swarm[i].fitness =
            safe_fitness(swarm[i].position, votes_train, votes_val, labels_train, labels_val, cfg.lambda);
    });

    PsoResult result;
    result.lambda = cfg.lambda;
    result.seed = cfg.seed;
    result.best_fitness = -std::numeric_limits<double>::infinity();
    for (auto& p : swarm) {
        p.best_position = p.position;
        p.best_fitness = p.fitness;
    }
    for (size_t i = 0; i < swarm.size(); ++i) {
        if (swarm[i].fitness > result.best_fitness) {
            result.best_fitness = swarm[i].fitness;
            result.best_weights = swarm[i].position;
            result.best_epoch = 0;
        }
    }

    const double vmax = cfg.velocity_clamp;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const WeightVector gbest = result.best_weights;
        parallel_over(swarm.size(), threads, [&](size_t i) {
            Particle& p = swarm[i];
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (size_t d = 0; d < dims; ++d) {
                const double r1 = unit(p.rng);
                const double r2 = unit(p.rng);
                double v = cfg.inertia * p.velocity[d] +
                           cfg.cognitive * r1 * (p.best_position[d] - p.position[d]) +
                           cfg.social * r2 * (gbest[d] - p.position[d]);
                v = std::clamp(v, -vmax, vmax);
                p.velocity[d] = v;
                p.position[d] = std::clamp(p.position[d] + v, 0.0, 1.0);
            }
            p.fitness =
                safe_fitness(p.position, votes_train, votes_val, labels_train, labels_val, cfg.lambda);
        });
        // epoch barrier: bests are updated in fixed particle order
        for (auto& p : swarm) {
            if (p.fitness > p.best_fitness) {
                p.best_fitness = p.fitness;
                p.best_position = p.position;
            }
        }
        for (size_t i = 0; i < swarm.size(); ++i) {
            if (swarm[i].fitness > result.best_fitness) {
                result.best_fitness = swarm[i].fitness;
                result.best_weights = swarm[i].position;
                result.best_epoch = epoch;
            }
        }
        result.fitness_trace.push_back(result.best_fitness);
    }

    if (result.best_weights.empty())
        throw_data("pso_optimize: no usable weight vector found (degenerate fitness)");
    result.best_report = evaluate_weights(result.best_weights, votes_train, votes_val, labels_train,
                                          labels_val, cfg.lambda);
    for (double w : result.best_weights)
        if (w <= 1e-12) ++result.zero_weight_count;
    return result;
}

std::vector<PsoResult> lambda_sweep(const VoteMatrix& votes_train, const VoteMatrix& votes_val,
                                    const std::vector<int>& labels_train,
                                    const std::vector<int>& labels_val, const PsoConfig& base_cfg,
                                    const std::vector<double>& lambdas, int threads) {
    if (lambdas.empty()) throw_data("lambda_sweep: need at least one lambda");
    std::vector<PsoResult> out;
    out.reserve(lambdas.size());
    for (size_t i = 0; i < lambdas.size(); ++i) {
        PsoConfig cfg = base_cfg;
        cfg.lambda = lambdas[i];
        cfg.seed = base_cfg.seed + i;  // independent, reproducible runs
        out.push_back(pso_optimize(votes_train, votes_val, labels_train, labels_val, cfg, threads));
    }
    return out;
}

}  // namespace ahpipe
