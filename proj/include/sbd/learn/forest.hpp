#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"
#include "sbd/learn/tree.hpp"

namespace sbd::learn {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 10;
    double min_gain = 0.0;          // member trees split on any positive structure
    double confidence = 0.1;        // only used when prune is on
    bool prune = false;             // member trees are left unpruned by default
    bool bootstrap = true;          // per-tree resample with replacement, size n
    bool feature_subsample = true;  // ceil(sqrt(d)) candidate features per split
    std::uint64_t seed = 0;
};

struct ForestModel {
    ForestConfig config;
    std::vector<TreeModel> trees;
};

// Bagged gain-ratio trees; each tree draws its bootstrap rows and per-split
// feature subsets from an independent stream derived from the seed, so the
// result is identical however the trees are scheduled.
ForestModel train_forest(const Dataset& dataset, const ForestConfig& config = {});

// Arithmetic mean of the member trees' scores.
double predict_forest(const ForestModel& model, const Eigen::VectorXd& x);

} // namespace sbd::learn
