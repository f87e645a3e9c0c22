#include "sbd/learn/naive_bayes.hpp"

#include <cmath>

#include "sbd/error.hpp"

namespace sbd::learn {

std::size_t nb_bin(const std::vector<double>& edges, double value) {
    std::size_t bins = edges.size() - 1;
    double lo = edges.front();
    double hi = edges.back();
    if (hi <= lo)
        return 0; // degenerate range: everything lands in the first bin
    if (value <= lo)
        return 0;
    if (value >= hi)
        return bins - 1;
    double width = (hi - lo) / static_cast<double>(bins);
    auto bin = static_cast<std::size_t>((value - lo) / width);
    return std::min(bin, bins - 1);
}

NBModel train_naive_bayes(const Dataset& dataset, const NBConfig& config) {
    if (config.bins < 2)
        throw DataError("naive bayes requires at least 2 bins");
    if (config.laplace <= 0.0)
        throw DataError("naive bayes requires a positive laplace constant");
    if (!dataset.both_classes_present())
        throw DataError("naive bayes needs both classes in the training data");

    const Eigen::Index n = dataset.n();
    const Eigen::Index d = dataset.d();
    const std::size_t B = config.bins;

    NBModel model;
    model.config = config;

    std::array<double, 2> class_counts{static_cast<double>(dataset.count(0.0)),
                                       static_cast<double>(dataset.count(1.0))};
    model.class_log_priors = {std::log(class_counts[0] / static_cast<double>(n)),
                              std::log(class_counts[1] / static_cast<double>(n))};

    model.bin_edges.resize(d);
    model.cond_log_prob.resize(d);
    for (Eigen::Index f = 0; f < d; ++f) {
        double lo = dataset.X.col(f).minCoeff();
        double hi = dataset.X.col(f).maxCoeff();
        auto& edges = model.bin_edges[f];
        edges.resize(B + 1);
        for (std::size_t b = 0; b <= B; ++b)
            edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(B);

        std::vector<std::array<double, 2>> counts(B, {0.0, 0.0});
        for (Eigen::Index i = 0; i < n; ++i)
            ++counts[nb_bin(edges, dataset.X(i, f))][dataset.y(i) == 1.0 ? 1 : 0];

        auto& table = model.cond_log_prob[f];
        table.resize(B);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < 2; ++c)
                table[b][c] = std::log((counts[b][c] + config.laplace) /
                                       (class_counts[c] + static_cast<double>(B) * config.laplace));
    }
    return model;
}

double predict_naive_bayes(const NBModel& model, const Eigen::VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(model.bin_edges.size()))
        throw DataError("naive bayes predict: expected " +
                        std::to_string(model.bin_edges.size()) + " features, got " +
                        std::to_string(x.size()));

    std::array<double, 2> log_post = model.class_log_priors;
    for (std::size_t f = 0; f < model.bin_edges.size(); ++f) {
        std::size_t bin = nb_bin(model.bin_edges[f], x(static_cast<Eigen::Index>(f)));
        for (std::size_t c = 0; c < 2; ++c)
            log_post[c] += model.cond_log_prob[f][bin][c];
    }
    // P(1 | x) = 1 / (1 + exp(l0 - l1)), computed stably.
    double diff = log_post[0] - log_post[1];
    return diff >= 0.0 ? std::exp(-diff) / (1.0 + std::exp(-diff)) : 1.0 / (1.0 + std::exp(diff));
}

} // namespace sbd::learn
