#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ahpipe {

struct ConfusionMatrix {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    int64_t total() const noexcept { return tp + fp + tn + fn; }
};

// Row = true class {0,1}, column = predicted class {0,1}; rows sum to 1
// where the true class is non-empty.
using NormalizedConfusion = std::array<std::array<double, 2>, 2>;

struct MetricReport {
    double bce = 0.0;
    double f1_macro = 0.0;
    double f1_weighted = 0.0;
    ConfusionMatrix confusion;
    NormalizedConfusion confusion_normalized{};
};

inline constexpr double kProbabilityClip = 1e-7;

// Mean of -[y ln p + (1-y) ln(1-p)] with p clipped to [1e-7, 1-1e-7].
double bce(const std::vector<int>& y, const std::vector<double>& p);

struct F1Result {
    double f1_macro = 0.0;
    double f1_weighted = 0.0;
    ConfusionMatrix confusion;
};

// Per-class F1 with the 0/0 -> 0 convention; macro is the unweighted mean
// over classes {0,1}, weighted is the support-weighted mean.
F1Result f1_scores(const std::vector<int>& y_true, const std::vector<int>& y_pred);

NormalizedConfusion normalize_confusion(const ConfusionMatrix& c);

// Full report from probabilities: predictions are score >= threshold.
MetricReport metric_report(const std::vector<int>& y, const std::vector<double>& p, double threshold);
// Full report when predictions are produced elsewhere (e.g. hard voting);
// probabilities only feed the BCE term.
MetricReport metric_report(const std::vector<int>& y, const std::vector<double>& p,
                           const std::vector<int>& y_pred);

}  // namespace ahpipe
