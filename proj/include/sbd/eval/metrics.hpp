#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sbd::eval {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// Positive prediction iff score > threshold; a score exactly at the
// threshold counts as negative.
ConfusionMatrix confusion(const Eigen::VectorXd& scores, const std::vector<int>& labels,
                          double threshold = 0.5);

struct ClassificationMetrics {
    double accuracy = 0.0;
    double classification_error = 0.0; // exactly 1 - accuracy
    double precision = 0.0;            // 0 when tp + fp == 0
    double recall = 0.0;               // 0 when tp + fn == 0
    double f1 = 0.0;                   // 0 when precision + recall == 0
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct RegressionMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
};

RegressionMetrics regression_metrics(const Eigen::VectorXd& predictions,
                                     const Eigen::VectorXd& targets, std::size_t d);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// Thresholds sweep the distinct scores in descending order (ties grouped),
// so the curve starts at (0,0), ends at (1,1), and never decreases.
std::vector<RocPoint> roc_curve(const Eigen::VectorXd& scores,
                                const std::vector<int>& labels);

// Trapezoidal area; equals the Mann-Whitney pair statistic
// [#(pos > neg) + half-credit for ties] / (#pos * #neg).
double auc(const std::vector<RocPoint>& points);

// Mean negative log-likelihood with scores clamped to [1e-15, 1 - 1e-15].
double log_loss(const Eigen::VectorXd& scores, const std::vector<int>& labels);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Per-class shuffled split; train takes round(fraction * class size) of each
// class, with the largest class adjusted by one if the total drifts from
// round(fraction * n).
SplitIndices stratified_split_indices(const std::vector<int>& labels, double train_fraction,
                                      std::uint64_t seed);

enum class Metric { accuracy, auc, f1, precision, recall };

std::string_view metric_name(Metric metric);
Metric metric_from_name(std::string_view name);

// Classification metrics use the 0.5 threshold; auc needs both classes.
double compute_metric(Metric metric, const Eigen::VectorXd& scores,
                      const std::vector<int>& labels);

} // namespace sbd::eval
