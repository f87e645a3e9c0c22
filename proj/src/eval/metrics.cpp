#include "sbd/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbd/error.hpp"
#include "sbd/rng.hpp"

namespace sbd::eval {

namespace {

void check_lengths(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    if (scores.size() == 0)
        throw DataError("metrics require at least one sample");
    if (static_cast<std::size_t>(scores.size()) != labels.size())
        throw DataError("scores and labels differ in length (" +
                        std::to_string(scores.size()) + " vs " +
                        std::to_string(labels.size()) + ")");
    for (int label : labels)
        if (label != 0 && label != 1)
            throw DataError("labels must be 0 or 1");
}

} // namespace

ConfusionMatrix confusion(const Eigen::VectorXd& scores, const std::vector<int>& labels,
                          double threshold) {
    check_lengths(scores, labels);
    ConfusionMatrix cm;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const bool predicted = scores(i) > threshold;
        const bool actual = labels[static_cast<std::size_t>(i)] == 1;
        if (predicted && actual)
            ++cm.tp;
        else if (predicted && !actual)
            ++cm.fp;
        else if (!predicted && !actual)
            ++cm.tn;
        else
            ++cm.fn;
    }
    return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0)
        throw DataError("confusion matrix is empty");
    ClassificationMetrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    m.classification_error = 1.0 - m.accuracy;
    m.precision = cm.tp + cm.fp == 0
                      ? 0.0
                      : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    m.recall = cm.tp + cm.fn == 0
                   ? 0.0
                   : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

RegressionMetrics regression_metrics(const Eigen::VectorXd& predictions,
                                     const Eigen::VectorXd& targets, std::size_t d) {
    const auto n = predictions.size();
    if (n < 2)
        throw DataError("regression metrics require at least 2 samples");
    if (targets.size() != n)
        throw DataError("predictions and targets differ in length");

    const Eigen::VectorXd residual = targets - predictions;
    RegressionMetrics m;
    m.rmse = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
    m.mae = residual.cwiseAbs().sum() / static_cast<double>(n);

    const double mean = targets.mean();
    const double ss_tot = (targets.array() - mean).matrix().squaredNorm();
    if (ss_tot == 0.0)
        throw DataError("targets have zero variance; R^2 is undefined");
    m.r2 = 1.0 - residual.squaredNorm() / ss_tot;

    if (static_cast<std::size_t>(n) <= d + 1)
        throw DataError("adjusted R^2 requires n > d + 1");
    m.adjusted_r2 = 1.0 - (1.0 - m.r2) * static_cast<double>(n - 1) /
                              static_cast<double>(static_cast<std::size_t>(n) - d - 1);
    return m;
}

std::vector<RocPoint> roc_curve(const Eigen::VectorXd& scores,
                                const std::vector<int>& labels) {
    check_lengths(scores, labels);
    std::size_t pos = 0;
    for (int label : labels)
        pos += static_cast<std::size_t>(label);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw DataError("roc curve requires both classes");

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
    });

    std::vector<RocPoint> points;
    points.push_back({0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores(static_cast<Eigen::Index>(order[i]));
        // One vertex per distinct score: everything scoring >= s is positive.
        for (; i < order.size() && scores(static_cast<Eigen::Index>(order[i])) == s; ++i) {
            if (labels[order[i]] == 1)
                ++tp;
            else
                ++fp;
        }
        points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return points;
}

double auc(const std::vector<RocPoint>& points) {
    if (points.size() < 2)
        throw DataError("auc requires at least two roc points");
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        if (b.fpr < a.fpr || b.tpr < a.tpr)
            throw DataError("roc points must be non-decreasing");
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return area;
}

double log_loss(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    check_lengths(scores, labels);
    constexpr double eps = 1e-15;
    double total = 0.0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const double p = std::clamp(scores(i), eps, 1.0 - eps);
        total -= labels[static_cast<std::size_t>(i)] == 1 ? std::log(p) : std::log1p(-p);
    }
    return total / static_cast<double>(scores.size());
}

SplitIndices stratified_split_indices(const std::vector<int>& labels, double train_fraction,
                                      std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("train fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw DataError("labels must be 0 or 1");
        by_class[labels[i]].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty())
        throw DataError("stratified split requires both classes");

    Rng rng(seed);
    rng.shuffle(by_class[0]);
    rng.shuffle(by_class[1]);

    std::size_t want[2];
    for (int c = 0; c < 2; ++c)
        want[c] = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(by_class[c].size())));

    // Keep the overall train size at round(fraction * n): per-class rounding
    // can drift by one, which we absorb in the larger class.
    const auto total_want = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(labels.size())));
    const int bigger = by_class[1].size() > by_class[0].size() ? 1 : 0;
    while (want[0] + want[1] < total_want)
        ++want[bigger];
    while (want[0] + want[1] > total_want)
        --want[bigger];

    SplitIndices split;
    for (int c = 0; c < 2; ++c) {
        if (want[c] == 0 || want[c] >= by_class[c].size())
            throw DataError("split would leave class " + std::to_string(c) +
                            " empty on one side; adjust the fraction");
        split.train.insert(split.train.end(), by_class[c].begin(),
                           by_class[c].begin() + static_cast<std::ptrdiff_t>(want[c]));
        split.test.insert(split.test.end(),
                          by_class[c].begin() + static_cast<std::ptrdiff_t>(want[c]),
                          by_class[c].end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
    case Metric::accuracy:
        return "accuracy";
    case Metric::auc:
        return "auc";
    case Metric::f1:
        return "f1";
    case Metric::precision:
        return "precision";
    case Metric::recall:
        return "recall";
    }
    throw DataError("unknown metric value");
}

Metric metric_from_name(std::string_view name) {
    for (Metric m : {Metric::accuracy, Metric::auc, Metric::f1, Metric::precision,
                     Metric::recall})
        if (metric_name(m) == name)
            return m;
    throw DataError("unknown metric \"" + std::string(name) + "\"");
}

double compute_metric(Metric metric, const Eigen::VectorXd& scores,
                      const std::vector<int>& labels) {
    if (metric == Metric::auc)
        return auc(roc_curve(scores, labels));
    const ClassificationMetrics m = classification_metrics(confusion(scores, labels));
    switch (metric) {
    case Metric::accuracy:
        return m.accuracy;
    case Metric::f1:
        return m.f1;
    case Metric::precision:
        return m.precision;
    case Metric::recall:
        return m.recall;
    default:
        throw DataError("unknown metric value");
    }
}

} // namespace sbd::eval
