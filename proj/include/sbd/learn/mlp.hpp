#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"

namespace sbd::learn {

enum class Activation { rectifier, tanh_unit, maxout };

std::string_view activation_name(Activation activation);
Activation activation_from_name(std::string_view name); // throws DataError on unknown names

struct MLPConfig {
    std::vector<std::size_t> hidden = {16, 16};
    Activation activation = Activation::rectifier;
    std::size_t maxout_pieces = 2; // affine pieces per unit when activation == maxout
    std::size_t max_iter = 200;
    double tol = 1e-7;        // converged when a step improves the loss by less
    double learning_rate = 0.1;
    double l2 = 1e-4;         // weight penalty l2/2 * sum of squared weights, biases excluded
    double dropout = 0.0;     // hidden-unit dropout rate in [0, 1)
    std::uint64_t seed = 0;
};

// Feed-forward binary classifier with a sigmoid output unit. Hidden layer l
// maps layer_sizes[l] inputs to layer_sizes[l+1] units; with maxout each
// unit owns `maxout_pieces` affine pieces, stored piece-major as extra rows
// of the weight matrix.
struct MLPModel {
    MLPConfig config;
    std::vector<std::size_t> layer_sizes;  // input d, hidden sizes, output 1
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: (pieces_l * out_l) x in_l
    std::vector<Eigen::VectorXd> biases;   // biases[l]:  pieces_l * out_l
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> loss_trace; // dropout-free loss per accepted step
};

// Full-batch gradient descent on mean cross-entropy plus the L2 penalty.
// The learning rate halves whenever a proposed step would increase the
// dropout-free loss (the step is re-proposed), so the recorded loss trace is
// non-increasing. Dropout masks are drawn from per-iteration streams derived
// from the seed. Throws DataError on an empty hidden list or invalid rates.
MLPModel train_mlp(const Dataset& dataset, const MLPConfig& config = {});

double predict_mlp(const MLPModel& model, const Eigen::VectorXd& x);

// Dropout-free loss and its exact gradient, exposed for finite-difference
// verification; shapes mirror the model's parameters.
double mlp_loss(const MLPModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct MLPGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

MLPGradients mlp_gradient(const MLPModel& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y);

} // namespace sbd::learn
