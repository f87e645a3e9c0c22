#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"

namespace sbd::learn {

struct NBConfig {
    std::size_t bins = 10;  // equal-width bins per feature, >= 2
    double laplace = 1.0;   // additive smoothing constant, > 0
};

// Naive Bayes over equal-width discretized features, everything in log
// space. Feature values outside the training range clamp to the edge bins.
struct NBModel {
    NBConfig config;
    std::array<double, 2> class_log_priors{};  // [class 0, class 1]
    // bin_edges[f] holds bins+1 edges spanning the training range.
    std::vector<std::vector<double>> bin_edges;
    // cond_log_prob[f][b][c] = log P(feature f falls in bin b | class c).
    std::vector<std::vector<std::array<double, 2>>> cond_log_prob;
};

// Conditionals are (count + laplace) / (class_count + bins * laplace), so no
// probability is ever zero. Throws DataError when a class is absent, bins <
// 2, or laplace <= 0.
NBModel train_naive_bayes(const Dataset& dataset, const NBConfig& config = {});

// Normalized posterior P(class = 1 | x); the two class posteriors sum to 1.
double predict_naive_bayes(const NBModel& model, const Eigen::VectorXd& x);

// Bin index for one value given a feature's edges (shared by training and
// prediction; exposed for tests).
std::size_t nb_bin(const std::vector<double>& edges, double value);

} // namespace sbd::learn
