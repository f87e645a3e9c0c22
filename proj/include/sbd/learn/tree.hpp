#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"
#include "sbd/rng.hpp"

namespace sbd::learn {

struct TreeConfig {
    std::size_t max_depth = 20;
    double min_gain = 0.05;  // information-gain floor for candidate splits
    double confidence = 0.1; // pessimistic-pruning confidence level in (0, 0.5]
    bool prune = true;       // post-prune with the pessimistic error estimate
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double count0 = 0.0; // training class counts reaching this node
    double count1 = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
    TreeConfig config;
    Eigen::Index n_features = 0;
    std::vector<TreeNode> nodes; // root at index 0, internal nodes before their children
    std::size_t depth = 0;       // deepest leaf; a lone root is depth 0
};

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double info_gain = 0.0;
    double gain_ratio = 0.0;
};

// Best binary split over the given rows: thresholds are midpoints between
// consecutive distinct sorted values, candidates need info_gain >= min_gain,
// and the winner maximizes gain ratio (ties: lower feature index, then lower
// threshold). Empty when no candidate qualifies.
std::optional<SplitCandidate> choose_split(const Dataset& dataset,
                                           const std::vector<std::size_t>& rows,
                                           const std::vector<Eigen::Index>& features,
                                           double min_gain);

// Greedy recursive partitioning with gain-ratio splits and optional
// pessimistic-error post-pruning.
TreeModel train_tree(const Dataset& dataset, const TreeConfig& config = {});

// Same, restricted to a row subset, optionally sampling `mtry` features per
// split from the supplied generator (used by the ensemble trainers).
TreeModel train_tree_on_rows(const Dataset& dataset, const TreeConfig& config,
                             const std::vector<std::size_t>& rows, Rng* feature_rng,
                             std::size_t mtry);

// Leaf score: fraction of positive training samples at the reached leaf.
double predict_tree(const TreeModel& model, const Eigen::VectorXd& x);

// Upper confidence bound on an error proportion of f = e/n observed over n
// samples (normal-approximation upper limit, used by the pruner); exposed
// for verification.
double binomial_upper_bound(double f, double n, double confidence);

} // namespace sbd::learn
