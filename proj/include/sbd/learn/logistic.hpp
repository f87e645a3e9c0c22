#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"

namespace sbd::learn {

struct LogisticConfig {
    std::size_t max_iter = 100;
    double tol = 1e-8; // convergence: max-norm of the mean-NLL gradient
};

struct LogisticModel {
    LogisticConfig config;
    double b0 = 0.0;
    Eigen::VectorXd b;
    bool converged = false;
    std::size_t iterations = 0;
    // Mean negative log-likelihood after each accepted Newton step
    // (in-memory diagnostic, not serialized).
    std::vector<double> loss_trace;
};

// Newton / iteratively-reweighted-least-squares fit of the Bernoulli
// log-likelihood, with step-halving so the negative log-likelihood never
// increases across accepted steps. Throws DataError when only one class is
// present or when the (jittered) Hessian solve fails.
LogisticModel train_logistic(const Dataset& dataset, const LogisticConfig& config = {});

double predict_logistic(const LogisticModel& model, const Eigen::VectorXd& x);

// Mean negative log-likelihood and its gradient, ordered [b0, b...]; exposed
// for finite-difference verification.
double logistic_loss(const Dataset& dataset, double b0, const Eigen::VectorXd& b);
Eigen::VectorXd logistic_gradient(const Dataset& dataset, double b0, const Eigen::VectorXd& b);

} // namespace sbd::learn
