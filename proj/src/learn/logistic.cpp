#include "sbd/learn/logistic.hpp"

#include <cmath>
#include <iostream>
#include <optional>

#include "sbd/error.hpp"

namespace sbd::learn {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

} // namespace

double logistic_loss(const Dataset& dataset, double b0, const Eigen::VectorXd& b) {
    Eigen::VectorXd z = (dataset.X * b).array() + b0;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        loss += softplus(z(i)) - dataset.y(i) * z(i);
    return loss / static_cast<double>(dataset.n());
}

Eigen::VectorXd logistic_gradient(const Dataset& dataset, double b0, const Eigen::VectorXd& b) {
    Eigen::VectorXd z = (dataset.X * b).array() + b0;
    Eigen::VectorXd residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        residual(i) = sigmoid(z(i)) - dataset.y(i);
    double inv_n = 1.0 / static_cast<double>(dataset.n());

    Eigen::VectorXd grad(dataset.d() + 1);
    grad(0) = residual.sum() * inv_n;
    grad.tail(dataset.d()) = dataset.X.transpose() * residual * inv_n;
    return grad;
}

LogisticModel train_logistic(const Dataset& dataset, const LogisticConfig& config) {
    if (!dataset.both_classes_present())
        throw DataError("logistic regression needs both classes in the training data");
    if (dataset.n() <= dataset.d())
        std::cerr << "warning: logistic fit with n = " << dataset.n()
                  << " rows and d = " << dataset.d() << " features may be ill-posed\n";

    const Eigen::Index d = dataset.d();
    const double inv_n = 1.0 / static_cast<double>(dataset.n());

    LogisticModel model;
    model.config = config;
    model.b = Eigen::VectorXd::Zero(d);

    double loss = logistic_loss(dataset, model.b0, model.b);
    model.loss_trace.push_back(loss);

    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        Eigen::VectorXd grad = logistic_gradient(dataset, model.b0, model.b);
        if (grad.lpNorm<Eigen::Infinity>() < config.tol) {
            model.converged = true;
            break;
        }

        // Hessian of the mean NLL over the augmented coefficients [b0, b].
        Eigen::VectorXd z = (dataset.X * model.b).array() + model.b0;
        Eigen::VectorXd w(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            double p = sigmoid(z(i));
            w(i) = p * (1.0 - p);
        }
        Eigen::MatrixXd hessian(d + 1, d + 1);
        hessian(0, 0) = w.sum() * inv_n;
        Eigen::VectorXd xw = dataset.X.transpose() * w * inv_n;
        hessian.block(0, 1, 1, d) = xw.transpose();
        hessian.block(1, 0, d, 1) = xw;
        hessian.block(1, 1, d, d) =
            dataset.X.transpose() * w.asDiagonal() * dataset.X * inv_n;

        // A singular Hessian shows up as a non-finite or inconsistent solve;
        // in that case ridge-jitter once and retry.
        auto newton_step = [&grad](const Eigen::MatrixXd& h) -> std::optional<Eigen::VectorXd> {
            Eigen::VectorXd s = h.ldlt().solve(-grad);
            if (!s.allFinite())
                return std::nullopt;
            double residual = (h * s + grad).lpNorm<Eigen::Infinity>();
            if (residual > 1e-6 * std::max(1.0, grad.lpNorm<Eigen::Infinity>()))
                return std::nullopt;
            return s;
        };
        std::optional<Eigen::VectorXd> maybe_step = newton_step(hessian);
        if (!maybe_step)
            maybe_step = newton_step(
                hessian + 1e-8 * Eigen::MatrixXd::Identity(d + 1, d + 1));
        if (!maybe_step)
            throw DataError("logistic regression: singular Hessian even after ridge jitter");
        Eigen::VectorXd step = std::move(*maybe_step);

        // Step-halving: accept the first damped step that does not increase
        // the loss; bail out of the iteration loop if none does.
        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 20; ++halving, scale *= 0.5) {
            double b0_try = model.b0 + scale * step(0);
            Eigen::VectorXd b_try = model.b + scale * step.tail(d);
            double loss_try = logistic_loss(dataset, b0_try, b_try);
            if (loss_try <= loss) {
                model.b0 = b0_try;
                model.b = std::move(b_try);
                loss = loss_try;
                accepted = true;
                break;
            }
        }
        ++model.iterations;
        if (!accepted)
            break;
        model.loss_trace.push_back(loss);
    }

    if (!model.converged) {
        Eigen::VectorXd grad = logistic_gradient(dataset, model.b0, model.b);
        model.converged = grad.lpNorm<Eigen::Infinity>() < config.tol;
    }
    return model;
}

double predict_logistic(const LogisticModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.b.size())
        throw DataError("logistic predict: expected " + std::to_string(model.b.size()) +
                        " features, got " + std::to_string(x.size()));
    return sigmoid(model.b0 + model.b.dot(x));
}

} // namespace sbd::learn
