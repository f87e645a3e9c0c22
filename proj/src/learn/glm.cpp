#include "sbd/learn/glm.hpp"

#include <algorithm>
#include <cmath>

#include "sbd/error.hpp"

namespace sbd::learn {

namespace {

double soft_threshold(double value, double threshold) {
    if (value > threshold)
        return value - threshold;
    if (value < -threshold)
        return value + threshold;
    return 0.0;
}

} // namespace

GLMModel train_glm_elastic(const Dataset& dataset, const GLMConfig& config) {
    if (config.lambda < 0.0)
        throw DataError("elastic net requires lambda >= 0");
    if (config.alpha < 0.0 || config.alpha > 1.0)
        throw DataError("elastic net requires alpha in [0, 1]");

    const Eigen::Index n = dataset.n();
    const Eigen::Index d = dataset.d();
    const double inv_n = 1.0 / static_cast<double>(n);

    GLMModel model;
    model.config = config;

    // Working matrix: standardized columns when requested; zero-variance
    // columns become all-zero and keep a zero coefficient.
    Eigen::MatrixXd W = dataset.X;
    model.column_means = Eigen::VectorXd::Zero(d);
    model.column_scales = Eigen::VectorXd::Zero(d);
    if (config.standardize) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double mean = W.col(j).mean();
            model.column_means(j) = mean;
            W.col(j).array() -= mean;
            double scale = std::sqrt(W.col(j).squaredNorm() * inv_n);
            model.column_scales(j) = scale;
            if (scale > 0.0)
                W.col(j) /= scale;
            else
                W.col(j).setZero();
        }
    }

    Eigen::VectorXd col_sq_norm(d);
    for (Eigen::Index j = 0; j < d; ++j)
        col_sq_norm(j) = W.col(j).squaredNorm() * inv_n;

    const double l1 = config.lambda * config.alpha;
    const double l2 = config.lambda * (1.0 - config.alpha);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    double b0 = 0.0;
    Eigen::VectorXd residual = dataset.y; // y - b0 - W*beta

    auto objective = [&] {
        return 0.5 * inv_n * residual.squaredNorm() +
               config.lambda * (config.alpha * beta.lpNorm<1>() +
                                0.5 * (1.0 - config.alpha) * beta.squaredNorm());
    };

    for (std::size_t sweep = 0; sweep < config.max_iter; ++sweep) {
        double max_delta = 0.0;

        // Exact minimization over the unpenalized intercept.
        double b0_shift = residual.mean();
        b0 += b0_shift;
        residual.array() -= b0_shift;
        max_delta = std::max(max_delta, std::abs(b0_shift));

        for (Eigen::Index j = 0; j < d; ++j) {
            if (col_sq_norm(j) == 0.0) {
                beta(j) = 0.0;
                continue;
            }
            double rho = inv_n * W.col(j).dot(residual) + col_sq_norm(j) * beta(j);
            double updated = soft_threshold(rho, l1) / (col_sq_norm(j) + l2);
            double delta = updated - beta(j);
            if (delta != 0.0) {
                residual -= delta * W.col(j);
                beta(j) = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }

        ++model.iterations;
        model.objective_trace.push_back(objective());
        if (max_delta < config.tol)
            break;
    }

    // Report coefficients on the original feature scale.
    if (config.standardize) {
        model.beta = Eigen::VectorXd::Zero(d);
        double mean_shift = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (model.column_scales(j) > 0.0) {
                model.beta(j) = beta(j) / model.column_scales(j);
                mean_shift += model.beta(j) * model.column_means(j);
            }
        }
        model.intercept = b0 - mean_shift;
    } else {
        model.beta = std::move(beta);
        model.intercept = b0;
    }
    return model;
}

double predict_glm(const GLMModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.beta.size())
        throw DataError("glm predict: expected " + std::to_string(model.beta.size()) +
                        " features, got " + std::to_string(x.size()));
    return std::clamp(model.intercept + model.beta.dot(x), 0.0, 1.0);
}

} // namespace sbd::learn
