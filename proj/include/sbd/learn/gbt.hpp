#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"
#include "sbd/learn/tree.hpp"

namespace sbd::learn {

struct GBTConfig {
    std::size_t n_trees = 20;
    std::size_t max_depth = 10;
    double min_gain = 0.0;
    double confidence = 0.1;
    bool prune = false;
    std::uint64_t seed = 0;
};

// Tree ensemble whose member scores are combined with optimized convex
// weights instead of a plain average.
struct GBTModel {
    GBTConfig config;
    std::vector<TreeModel> trees;
    Eigen::VectorXd weights; // simplex: non-negative, summing to 1
};

// Minimizes |y - S*alpha|^2 subject to sum(alpha) = 1 via the KKT system of
// the equality-constrained least-squares problem (ridge-jittered when
// singular). A solution with negative entries is projected onto the
// probability simplex; if the projected point fits the training scores worse
// than uniform weights, uniform weights are returned, so the optimized
// training MSE never exceeds the uniform-average MSE.
Eigen::VectorXd optimize_ensemble_weights(const Eigen::MatrixXd& tree_scores,
                                          const Eigen::VectorXd& y);

// Bootstrap-trained trees scored on the full training set, then weighted by
// optimize_ensemble_weights.
GBTModel train_gbt(const Dataset& dataset, const GBTConfig& config = {});

// Weighted sum of the member trees' scores.
double predict_gbt(const GBTModel& model, const Eigen::VectorXd& x);

} // namespace sbd::learn
