#include "sbd/learn/mlp.hpp"

#include <cmath>

#include "sbd/error.hpp"
#include "sbd/rng.hpp"

namespace sbd::learn {

namespace {

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

std::size_t pieces_of(const MLPConfig& config) {
    return config.activation == Activation::maxout ? config.maxout_pieces : 1;
}

// One forward pass over all samples; keeps what backprop needs.
struct Forward {
    std::vector<Eigen::MatrixXd> activations;   // activations[l]: n x layer_sizes[l]
    std::vector<Eigen::MatrixXd> pre;           // pre[l]: n x (pieces * out), hidden only
    std::vector<Eigen::MatrixXi> argmax_piece;  // maxout winners, hidden only
    Eigen::VectorXd logits;                     // n
};

Forward forward_pass(const MLPModel& model, const Eigen::MatrixXd& X,
                     const std::vector<Eigen::MatrixXd>* dropout_masks) {
    const auto& config = model.config;
    const std::size_t hidden_layers = model.layer_sizes.size() - 2;
    const std::size_t pieces = pieces_of(config);

    Forward f;
    f.activations.reserve(hidden_layers + 1);
    f.activations.push_back(X);

    for (std::size_t l = 0; l < hidden_layers; ++l) {
        const auto out = static_cast<Eigen::Index>(model.layer_sizes[l + 1]);
        Eigen::MatrixXd z =
            (f.activations[l] * model.weights[l].transpose()).rowwise() +
            model.biases[l].transpose();
        f.pre.push_back(z);

        Eigen::MatrixXd h(X.rows(), out);
        Eigen::MatrixXi winners;
        switch (config.activation) {
        case Activation::rectifier:
            h = z.cwiseMax(0.0);
            break;
        case Activation::tanh_unit:
            h = z.array().tanh();
            break;
        case Activation::maxout:
            winners.resize(X.rows(), out);
            for (Eigen::Index i = 0; i < X.rows(); ++i)
                for (Eigen::Index j = 0; j < out; ++j) {
                    double best = z(i, j);
                    int best_piece = 0;
                    for (std::size_t p = 1; p < pieces; ++p) {
                        double v = z(i, static_cast<Eigen::Index>(p) * out + j);
                        if (v > best) {
                            best = v;
                            best_piece = static_cast<int>(p);
                        }
                    }
                    h(i, j) = best;
                    winners(i, j) = best_piece;
                }
            break;
        }
        f.argmax_piece.push_back(std::move(winners));
        if (dropout_masks != nullptr)
            h.array() *= (*dropout_masks)[l].array();
        f.activations.push_back(std::move(h));
    }

    const auto& w_out = model.weights.back();
    f.logits = (f.activations.back() * w_out.transpose()).col(0).array() +
               model.biases.back()(0);
    return f;
}

double loss_from_logits(const Eigen::VectorXd& logits, const Eigen::VectorXd& y,
                        const MLPModel& model) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i)
        loss += softplus(logits(i)) - y(i) * logits(i);
    loss /= static_cast<double>(logits.size());
    double penalty = 0.0;
    for (const auto& w : model.weights)
        penalty += w.squaredNorm();
    return loss + 0.5 * model.config.l2 * penalty;
}

MLPGradients backward_pass(const MLPModel& model, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& y, const Forward& f,
                           const std::vector<Eigen::MatrixXd>* dropout_masks) {
    const auto& config = model.config;
    const std::size_t hidden_layers = model.layer_sizes.size() - 2;
    const std::size_t pieces = pieces_of(config);
    const double inv_n = 1.0 / static_cast<double>(X.rows());

    MLPGradients grads;
    grads.weights.resize(model.weights.size());
    grads.biases.resize(model.biases.size());

    Eigen::VectorXd delta_out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        delta_out(i) = (sigmoid(f.logits(i)) - y(i)) * inv_n;

    grads.weights.back() =
        delta_out.transpose() * f.activations.back() + config.l2 * model.weights.back();
    grads.biases.back() = Eigen::VectorXd::Constant(1, delta_out.sum());

    // Gradient flowing into the activations of the current hidden layer.
    Eigen::MatrixXd upstream = delta_out * model.weights.back(); // n x last_hidden
    for (std::size_t l = hidden_layers; l-- > 0;) {
        const auto out = static_cast<Eigen::Index>(model.layer_sizes[l + 1]);
        if (dropout_masks != nullptr)
            upstream.array() *= (*dropout_masks)[l].array();

        // Gradient w.r.t. the pre-activation rows (pieces * out per sample).
        Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(X.rows(), f.pre[l].cols());
        switch (config.activation) {
        case Activation::rectifier:
            dz = (f.pre[l].array() > 0.0).cast<double>() * upstream.array();
            break;
        case Activation::tanh_unit:
            dz = (1.0 - f.pre[l].array().tanh().square()) * upstream.array();
            break;
        case Activation::maxout:
            for (Eigen::Index i = 0; i < X.rows(); ++i)
                for (Eigen::Index j = 0; j < out; ++j)
                    dz(i, static_cast<Eigen::Index>(f.argmax_piece[l](i, j)) * out + j) =
                        upstream(i, j);
            break;
        }

        grads.weights[l] = dz.transpose() * f.activations[l] + config.l2 * model.weights[l];
        grads.biases[l] = dz.colwise().sum().transpose();

        if (l > 0) {
            if (pieces == 1) {
                upstream = dz * model.weights[l];
            } else {
                upstream = dz * model.weights[l]; // rows already routed per piece
            }
        }
    }
    return grads;
}

std::vector<Eigen::MatrixXd> draw_dropout_masks(const MLPModel& model, Eigen::Index n,
                                                Rng& rng) {
    std::vector<Eigen::MatrixXd> masks;
    const std::size_t hidden_layers = model.layer_sizes.size() - 2;
    const double keep = 1.0 - model.config.dropout;
    for (std::size_t l = 0; l < hidden_layers; ++l) {
        Eigen::MatrixXd mask(n, static_cast<Eigen::Index>(model.layer_sizes[l + 1]));
        for (Eigen::Index i = 0; i < mask.rows(); ++i)
            for (Eigen::Index j = 0; j < mask.cols(); ++j)
                mask(i, j) = rng.bernoulli(keep) ? 1.0 / keep : 0.0; // inverted dropout
        masks.push_back(std::move(mask));
    }
    return masks;
}

void validate_config(const Dataset& dataset, const MLPConfig& config) {
    if (config.hidden.empty())
        throw DataError("mlp requires at least one hidden layer");
    for (std::size_t size : config.hidden)
        if (size == 0)
            throw DataError("mlp hidden layer sizes must be positive");
    if (config.activation == Activation::maxout && config.maxout_pieces < 2)
        throw DataError("maxout requires at least 2 pieces");
    if (config.learning_rate <= 0.0)
        throw DataError("mlp requires a positive learning rate");
    if (config.dropout < 0.0 || config.dropout >= 1.0)
        throw DataError("mlp dropout rate must lie in [0, 1)");
    if (config.l2 < 0.0)
        throw DataError("mlp weight penalty must be non-negative");
    if (!dataset.both_classes_present())
        throw DataError("mlp needs both classes in the training data");
}

} // namespace

std::string_view activation_name(Activation activation) {
    switch (activation) {
    case Activation::rectifier:
        return "rectifier";
    case Activation::tanh_unit:
        return "tanh";
    case Activation::maxout:
        return "maxout";
    }
    throw DataError("unknown activation value");
}

Activation activation_from_name(std::string_view name) {
    if (name == "rectifier")
        return Activation::rectifier;
    if (name == "tanh")
        return Activation::tanh_unit;
    if (name == "maxout")
        return Activation::maxout;
    throw DataError("unknown activation \"" + std::string(name) + "\"");
}

double mlp_loss(const MLPModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Forward f = forward_pass(model, X, nullptr);
    return loss_from_logits(f.logits, y, model);
}

MLPGradients mlp_gradient(const MLPModel& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y) {
    Forward f = forward_pass(model, X, nullptr);
    return backward_pass(model, X, y, f, nullptr);
}

MLPModel train_mlp(const Dataset& dataset, const MLPConfig& config) {
    validate_config(dataset, config);

    MLPModel model;
    model.config = config;
    model.layer_sizes.push_back(static_cast<std::size_t>(dataset.d()));
    model.layer_sizes.insert(model.layer_sizes.end(), config.hidden.begin(),
                             config.hidden.end());
    model.layer_sizes.push_back(1);

    const std::size_t pieces = pieces_of(config);
    const std::size_t layers = model.layer_sizes.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        Rng rng(config.seed, l); // per-layer init stream
        const auto in = static_cast<Eigen::Index>(model.layer_sizes[l]);
        const auto out = static_cast<Eigen::Index>(model.layer_sizes[l + 1]);
        const auto rows =
            l + 1 < model.layer_sizes.size() - 1
                ? static_cast<Eigen::Index>(pieces) * out
                : out; // the output layer is a single affine unit
        double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        Eigen::MatrixXd w(rows, in);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < in; ++c)
                w(r, c) = rng.uniform(-limit, limit);
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(rows));
    }

    double lr = config.learning_rate;
    double loss = mlp_loss(model, dataset.X, dataset.y);
    model.loss_trace.push_back(loss);

    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        MLPGradients grads;
        if (config.dropout > 0.0) {
            Rng iter_rng(config.seed, 0x6d61736bULL + iter); // per-iteration mask stream
            auto masks = draw_dropout_masks(model, dataset.n(), iter_rng);
            Forward f = forward_pass(model, dataset.X, &masks);
            grads = backward_pass(model, dataset.X, dataset.y, f, &masks);
        } else {
            grads = mlp_gradient(model, dataset.X, dataset.y);
        }

        // Halve the rate until the dropout-free loss stops increasing.
        bool accepted = false;
        while (lr >= 1e-15) {
            MLPModel trial = model;
            for (std::size_t l = 0; l < trial.weights.size(); ++l) {
                trial.weights[l] -= lr * grads.weights[l];
                trial.biases[l] -= lr * grads.biases[l];
            }
            double trial_loss = mlp_loss(trial, dataset.X, dataset.y);
            if (trial_loss <= loss) {
                double improvement = loss - trial_loss;
                model.weights = std::move(trial.weights);
                model.biases = std::move(trial.biases);
                loss = trial_loss;
                model.loss_trace.push_back(loss);
                accepted = true;
                ++model.iterations;
                if (improvement < config.tol)
                    model.converged = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted || model.converged)
            break;
    }
    return model;
}

double predict_mlp(const MLPModel& model, const Eigen::VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(model.layer_sizes.front()))
        throw DataError("mlp predict: expected " + std::to_string(model.layer_sizes.front()) +
                        " features, got " + std::to_string(x.size()));
    Forward f = forward_pass(model, x.transpose(), nullptr);
    return sigmoid(f.logits(0));
}

} // namespace sbd::learn
