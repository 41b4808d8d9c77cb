#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ahpipe/data_model.hpp"

namespace ahpipe {

// Scales v to unit L2 norm; the zero vector is returned unchanged.
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v);
Eigen::MatrixXd l2_normalize_rows(const Eigen::MatrixXd& rows);

// dot(a,b) / (|a||b|), clamped to [-1, 1]. A zero-norm operand is an error.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Outlier report for one embedding sequence. scores[i] is the mean cosine
// similarity of chunk i to every other chunk (1.0 for a single chunk);
// a chunk is kept iff |score - median| <= multiplier * mad. When mad is 0
// only chunks sitting at the median survive, so an all-identical sequence
// keeps everything while a lone outlier is still dropped.
struct MadFilterReport {
    std::vector<bool> kept;
    std::vector<double> scores;
    double median = 0.0;
    double mad = 0.0;
    double multiplier = 50.0;

    size_t kept_count() const;
};

MadFilterReport mad_filter(const EmbeddingSequence& seq, double multiplier = 50.0);
EmbeddingSequence apply_mad_filter(const EmbeddingSequence& seq, const MadFilterReport& report);

// [mean of chunks | mean of first differences | mean of second differences],
// length 3 x dim. Difference blocks are zero when the sequence is too short.
Eigen::VectorXd derivative_pool(const EmbeddingSequence& seq);

// Elementwise min/max/mean/population-std over an ordered stream.
struct PooledStats {
    Eigen::VectorXd min, max, mean, std;

    Eigen::VectorXd concat() const;  // [min | max | mean | std]
};

PooledStats stat_pool(const Eigen::MatrixXd& stream);  // one row per step
PooledStats stat_pool(const std::vector<double>& stream);

struct ScalerModel {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // population std; 1.0 for zero-variance columns
};

ScalerModel fit_scaler(const Eigen::MatrixXd& rows);
Eigen::MatrixXd apply_scaler(const ScalerModel& m, const Eigen::MatrixXd& rows);
Eigen::MatrixXd invert_scaler(const ScalerModel& m, const Eigen::MatrixXd& rows);

struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;                 // k x d, orthonormal rows
    Eigen::VectorXd explained_variance_ratio;   // length k, non-increasing
    Eigen::Index k = 0;
};

// k = min(target_dim, smallest k' reaching min_variance cumulative ratio,
// rank of the centered data). Components are deterministic: each row's
// largest-magnitude entry is made positive.
PcaModel fit_pca(const Eigen::MatrixXd& rows, Eigen::Index target_dim, double min_variance = 0.99);
Eigen::MatrixXd apply_pca(const PcaModel& m, const Eigen::MatrixXd& rows);
Eigen::MatrixXd reconstruct_pca(const PcaModel& m, const Eigen::MatrixXd& projected);

// softmax(scores * temperature), computed with max subtraction.
// The temperature acts as a multiplier that sharpens differences.
Eigen::VectorXd softmax_temperature(const Eigen::VectorXd& scores, double temperature);

void save_scaler(const std::string& path, const ScalerModel& m);
ScalerModel load_scaler(const std::string& path);
void save_pca(const std::string& path, const PcaModel& m);
PcaModel load_pca(const std::string& path);

}  // namespace ahpipe
