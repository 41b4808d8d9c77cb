#include "ahpipe/feature_ops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ahpipe/json_util.hpp"

namespace ahpipe {

using nlohmann::json;

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v) {
    if (!v.allFinite()) throw_numeric("l2_normalize: non-finite entry");
    double n = v.norm();
    if (n == 0.0) return v;
    return v / n;
}

Eigen::MatrixXd l2_normalize_rows(const Eigen::MatrixXd& rows) {
    Eigen::MatrixXd out = rows;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        out.row(r) = l2_normalize(out.row(r).transpose()).transpose();
    return out;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw_data("cosine_similarity: length mismatch");
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw_numeric("cosine_similarity undefined for a zero vector");
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

namespace {

double median_of(std::vector<double> v) {
    size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

size_t MadFilterReport::kept_count() const {
    return static_cast<size_t>(std::count(kept.begin(), kept.end(), true));
}

MadFilterReport mad_filter(const EmbeddingSequence& seq, double multiplier) {
    const Eigen::Index n = seq.chunk_count();
    if (n < 1) throw_data("mad_filter: sequence has no chunks");
    if (multiplier <= 0.0) throw_data("mad_filter: multiplier must be positive");

    MadFilterReport rep;
    rep.multiplier = multiplier;
    rep.scores.resize(static_cast<size_t>(n));
    if (n == 1) {
        rep.scores[0] = 1.0;
        rep.median = 1.0;
        rep.mad = 0.0;
        rep.kept = {true};
        return rep;
    }

    // Pairwise cosine similarities via normalized rows; chunks with zero norm
    // have no defined similarity.
    Eigen::MatrixXd unit(n, seq.dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        double norm = seq.chunks.row(i).norm();
        if (norm == 0.0)
            throw_numeric("mad_filter: undefined similarity, chunk " + std::to_string(i) + " has zero norm");
        unit.row(i) = seq.chunks.row(i) / norm;
    }
    Eigen::MatrixXd sim = unit * unit.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = sim.row(i).sum() - sim(i, i);
        rep.scores[static_cast<size_t>(i)] = sum / static_cast<double>(n - 1);
    }

    rep.median = median_of(rep.scores);
    std::vector<double> dev(rep.scores.size());
    for (size_t i = 0; i < rep.scores.size(); ++i) dev[i] = std::abs(rep.scores[i] - rep.median);
    rep.mad = median_of(dev);

    // Small slack so that an all-identical sequence (mad = 0, every score at
    // the median up to rounding) keeps all chunks.
    const double bound = multiplier * rep.mad + 1e-12;
    rep.kept.resize(rep.scores.size());
    for (size_t i = 0; i < rep.scores.size(); ++i)
        rep.kept[i] = std::abs(rep.scores[i] - rep.median) <= bound;
    return rep;
}

EmbeddingSequence apply_mad_filter(const EmbeddingSequence& seq, const MadFilterReport& report) {
    if (static_cast<size_t>(seq.chunk_count()) != report.kept.size())
        throw_data("apply_mad_filter: report does not match sequence");
    EmbeddingSequence out;
    out.video_id = seq.video_id;
    out.modality = seq.modality;
    out.chunks.resize(static_cast<Eigen::Index>(report.kept_count()), seq.dim());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < seq.chunk_count(); ++i)
        if (report.kept[static_cast<size_t>(i)]) out.chunks.row(r++) = seq.chunks.row(i);
    return out;
}

Eigen::VectorXd derivative_pool(const EmbeddingSequence& seq) {
    const Eigen::Index n = seq.chunk_count();
    const Eigen::Index d = seq.dim();
    if (n < 1) throw_data("derivative_pool: sequence has no chunks");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * d);
    out.head(d) = seq.chunks.colwise().mean().transpose();
    if (n >= 2) {
        Eigen::MatrixXd d1 = seq.chunks.bottomRows(n - 1) - seq.chunks.topRows(n - 1);
        out.segment(d, d) = d1.colwise().mean().transpose();
        if (n >= 3) {
            Eigen::MatrixXd d2 = d1.bottomRows(n - 2) - d1.topRows(n - 2);
            out.tail(d) = d2.colwise().mean().transpose();
        }
    }
    return out;
}

PooledStats stat_pool(const Eigen::MatrixXd& stream) {
    if (stream.rows() == 0) throw_data("empty input: stat_pool needs at least one step");
    PooledStats s;
    s.min = stream.colwise().minCoeff().transpose();
    s.max = stream.colwise().maxCoeff().transpose();
    s.mean = stream.colwise().mean().transpose();
    Eigen::MatrixXd centered = stream.rowwise() - s.mean.transpose();
    s.std = centered.array().square().colwise().mean().sqrt().matrix().transpose();
    return s;
}

PooledStats stat_pool(const std::vector<double>& stream) {
    if (stream.empty()) throw_data("empty input: stat_pool needs at least one step");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(stream.size()), 1);
    for (size_t i = 0; i < stream.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = stream[i];
    return stat_pool(m);
}

Eigen::VectorXd PooledStats::concat() const {
    Eigen::VectorXd out(4 * min.size());
    out << min, max, mean, std;
    return out;
}

ScalerModel fit_scaler(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2) throw_data("fit_scaler: insufficient data, need at least 2 rows");
    ScalerModel m;
    m.mean = rows.colwise().mean().transpose();
    Eigen::MatrixXd centered = rows.rowwise() - m.mean.transpose();
    m.scale = centered.array().square().colwise().mean().sqrt().matrix().transpose();
    for (Eigen::Index c = 0; c < m.scale.size(); ++c)
        if (m.scale(c) <= 1e-12) m.scale(c) = 1.0;  // zero-variance columns map to 0
    return m;
}

Eigen::MatrixXd apply_scaler(const ScalerModel& m, const Eigen::MatrixXd& rows) {
    if (rows.cols() != m.mean.size()) throw_data("apply_scaler: feature count mismatch");
    return ((rows.rowwise() - m.mean.transpose()).array().rowwise() / m.scale.transpose().array())
        .matrix();
}

Eigen::MatrixXd invert_scaler(const ScalerModel& m, const Eigen::MatrixXd& rows) {
    if (rows.cols() != m.mean.size()) throw_data("invert_scaler: feature count mismatch");
    Eigen::MatrixXd scaled = (rows.array().rowwise() * m.scale.transpose().array()).matrix();
    return scaled.rowwise() + m.mean.transpose();
}

PcaModel fit_pca(const Eigen::MatrixXd& rows, Eigen::Index target_dim, double min_variance) {
    const Eigen::Index n = rows.rows();
    const Eigen::Index d = rows.cols();
    if (n < 2) throw_data("fit_pca: insufficient data, need at least 2 rows");
    if (target_dim < 1) throw_data("fit_pca: target_dim must be positive");
    if (target_dim > d)
        throw_data("fit_pca: target_dim " + std::to_string(target_dim) + " exceeds feature count " +
                   std::to_string(d));

    PcaModel m;
    m.mean = rows.colwise().mean().transpose();
    Eigen::MatrixXd centered = rows.rowwise() - m.mean.transpose();

    // Population covariance spectrum. When d > n the Gram matrix gives the
    // same nonzero eigenvalues at n^2 cost instead of d^2.
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // columns, matching order
    if (d <= n) {
        Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        if (solver.info() != Eigen::Success) throw_numeric("fit_pca: eigendecomposition failed");
        eigenvalues = solver.eigenvalues().reverse();
        eigenvectors = solver.eigenvectors().rowwise().reverse();
    } else {
        Eigen::MatrixXd gram = centered * centered.transpose() / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) throw_numeric("fit_pca: eigendecomposition failed");
        eigenvalues = solver.eigenvalues().reverse();
        Eigen::MatrixXd u = solver.eigenvectors().rowwise().reverse();
        eigenvectors.resize(d, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd v = centered.transpose() * u.col(i);
            double norm = v.norm();
            eigenvectors.col(i) = norm > 0 ? Eigen::VectorXd(v / norm) : v;
        }
    }
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues(i) < 0) eigenvalues(i) = 0.0;

    const double total = centered.array().square().sum() / static_cast<double>(n);
    const Eigen::Index available = eigenvalues.size();

    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < available; ++i)
        if (eigenvalues(i) > total * 1e-12) ++rank;

    Eigen::Index k_var = 1;
    if (total > 0) {
        double cum = 0.0;
        for (Eigen::Index i = 0; i < available; ++i) {
            cum += eigenvalues(i) / total;
            k_var = i + 1;
            if (cum >= min_variance) break;
        }
    }

    m.k = std::min({target_dim, k_var, std::max<Eigen::Index>(rank, 0)});
    if (m.k < 0) m.k = 0;

    m.components.resize(m.k, d);
    m.explained_variance_ratio.resize(m.k);
    for (Eigen::Index i = 0; i < m.k; ++i) {
        Eigen::VectorXd comp = eigenvectors.col(i);
        // Deterministic sign: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        comp.cwiseAbs().maxCoeff(&arg);
        if (comp(arg) < 0) comp = -comp;
        m.components.row(i) = comp.transpose();
        m.explained_variance_ratio(i) = total > 0 ? eigenvalues(i) / total : 0.0;
    }
    return m;
}

Eigen::MatrixXd apply_pca(const PcaModel& m, const Eigen::MatrixXd& rows) {
    if (rows.cols() != m.mean.size()) throw_data("apply_pca: feature count mismatch");
    return (rows.rowwise() - m.mean.transpose()) * m.components.transpose();
}

Eigen::MatrixXd reconstruct_pca(const PcaModel& m, const Eigen::MatrixXd& projected) {
    if (projected.cols() != m.k) throw_data("reconstruct_pca: component count mismatch");
    return (projected * m.components).rowwise() + m.mean.transpose();
}

Eigen::VectorXd softmax_temperature(const Eigen::VectorXd& scores, double temperature) {
    if (temperature <= 0.0) throw_data("softmax_temperature: temperature must be positive");
    if (scores.size() == 0) throw_data("empty input: softmax_temperature");
    Eigen::VectorXd z = scores * temperature;
    Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
}

void save_scaler(const std::string& path, const ScalerModel& m) {
    json j{{"type", "standard_scaler"}, {"mean", to_json(m.mean)}, {"scale", to_json(m.scale)}};
    write_json_file(path, j);
}

ScalerModel load_scaler(const std::string& path) {
    json j = read_json_file(path);
    if (j.value("type", "") != "standard_scaler") throw_data("not a scaler model: " + path);
    ScalerModel m;
    m.mean = vector_from_json(j.at("mean"));
    m.scale = vector_from_json(j.at("scale"));
    return m;
}

void save_pca(const std::string& path, const PcaModel& m) {
    json j{{"type", "pca"},
           {"mean", to_json(m.mean)},
           {"components", to_json(m.components)},
           {"explained_variance_ratio", to_json(m.explained_variance_ratio)},
           {"k", m.k}};
    write_json_file(path, j);
}

PcaModel load_pca(const std::string& path) {
    json j = read_json_file(path);
    if (j.value("type", "") != "pca") throw_data("not a pca model: " + path);
    PcaModel m;
    m.mean = vector_from_json(j.at("mean"));
    m.components = matrix_from_json(j.at("components"));
    m.explained_variance_ratio = vector_from_json(j.at("explained_variance_ratio"));
    m.k = j.at("k").get<Eigen::Index>();
    if (m.components.rows() != m.k) throw_data("pca model inconsistent: " + path);
    return m;
}

}  // namespace ahpipe
