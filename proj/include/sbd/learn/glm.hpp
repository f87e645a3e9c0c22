#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sbd/learn/dataset.hpp"

namespace sbd::learn {

struct GLMConfig {
    double lambda = 1e-3;     // overall penalty weight, >= 0
    double alpha = 0.5;       // L1/L2 mix in [0, 1]; 1 = lasso, 0 = ridge
    bool standardize = true;  // fit on zero-mean unit-variance columns
    std::size_t max_iter = 1000; // coordinate-descent sweeps
    double tol = 1e-9;        // stop when no coefficient moves more than this
};

// Linear model fit by elastic-net penalized least squares. Coefficients are
// reported on the original feature scale regardless of standardization.
struct GLMModel {
    GLMConfig config;
    double intercept = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd column_means;  // recorded when standardize is on
    Eigen::VectorXd column_scales; // population standard deviations (0 kept as 0)
    std::size_t iterations = 0;
    // Penalized objective after each sweep (in-memory diagnostic).
    std::vector<double> objective_trace;
};

// Minimizes (1/2n)·sum (y - b0 - x·beta)^2 + lambda·(alpha·|beta|_1 +
// (1-alpha)/2·|beta|_2^2) by cyclic coordinate descent with
// soft-thresholding; the intercept is unpenalized. Zero-variance columns
// keep a zero coefficient.
GLMModel train_glm_elastic(const Dataset& dataset, const GLMConfig& config = {});

// Linear score clamped to [0, 1] so the model slots into the common
// classifier interface.
double predict_glm(const GLMModel& model, const Eigen::VectorXd& x);

} // namespace sbd::learn
