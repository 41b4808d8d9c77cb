#include "ahpipe/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ahpipe/error.hpp"

namespace ahpipe {

double bce(const std::vector<int>& y, const std::vector<double>& p) {
    if (y.empty()) throw_data("empty input: bce needs at least one sample");
    if (y.size() != p.size()) throw_data("bce: label/probability length mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        double pi = std::clamp(p[i], kProbabilityClip, 1.0 - kProbabilityClip);
        sum += y[i] ? -std::log(pi) : -std::log(1.0 - pi);
    }
    return sum / static_cast<double>(y.size());
}

namespace {

// F1 of one class given its confusion counts; 0/0 -> 0.
double class_f1(int64_t tp, int64_t fp, int64_t fn) {
    int64_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

F1Result f1_scores(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.empty()) throw_data("empty input: f1_scores needs at least one sample");
    if (y_true.size() != y_pred.size()) throw_data("f1_scores: length mismatch");
    F1Result r;
    for (size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i]) {
            y_pred[i] ? ++r.confusion.tp : ++r.confusion.fn;
        } else {
            y_pred[i] ? ++r.confusion.fp : ++r.confusion.tn;
        }
    }
    const auto& c = r.confusion;
    double f1_pos = class_f1(c.tp, c.fp, c.fn);
    // class 0 viewed as the positive class: tn are its true positives
    double f1_neg = class_f1(c.tn, c.fn, c.fp);
    r.f1_macro = 0.5 * (f1_pos + f1_neg);
    int64_t support_pos = c.tp + c.fn;
    int64_t support_neg = c.tn + c.fp;
    r.f1_weighted = (static_cast<double>(support_pos) * f1_pos + static_cast<double>(support_neg) * f1_neg) /
                    static_cast<double>(support_pos + support_neg);
    return r;
}

NormalizedConfusion normalize_confusion(const ConfusionMatrix& c) {
    NormalizedConfusion out{};
    int64_t neg = c.tn + c.fp;
    int64_t pos = c.tp + c.fn;
    if (neg > 0) {
        out[0][0] = static_cast<double>(c.tn) / static_cast<double>(neg);
        out[0][1] = static_cast<double>(c.fp) / static_cast<double>(neg);
    }
    if (pos > 0) {
        out[1][0] = static_cast<double>(c.fn) / static_cast<double>(pos);
        out[1][1] = static_cast<double>(c.tp) / static_cast<double>(pos);
    }
    return out;
}

MetricReport metric_report(const std::vector<int>& y, const std::vector<double>& p, double threshold) {
    std::vector<int> preds(p.size());
    for (size_t i = 0; i < p.size(); ++i) preds[i] = p[i] >= threshold ? 1 : 0;
    return metric_report(y, p, preds);
}

MetricReport metric_report(const std::vector<int>& y, const std::vector<double>& p,
                           const std::vector<int>& y_pred) {
    MetricReport rep;
    rep.bce = bce(y, p);
    F1Result f1 = f1_scores(y, y_pred);
    rep.f1_macro = f1.f1_macro;
    rep.f1_weighted = f1.f1_weighted;
    rep.confusion = f1.confusion;
    rep.confusion_normalized = normalize_confusion(f1.confusion);
    return rep;
}

}  // namespace ahpipe
