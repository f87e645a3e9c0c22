#include "sbd/learn/forest.hpp"

#include <cmath>
#include <numeric>

#include "sbd/error.hpp"
#include "sbd/rng.hpp"

namespace sbd::learn {

ForestModel train_forest(const Dataset& dataset, const ForestConfig& config) {
    if (config.n_trees < 1)
        throw DataError("random forest requires at least one tree");

    TreeConfig tree_config{config.max_depth, config.min_gain, config.confidence, config.prune};
    std::size_t mtry = 0;
    if (config.feature_subsample)
        mtry = static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(dataset.d()))));

    ForestModel model;
    model.config = config;
    model.trees.reserve(config.n_trees);

    const auto n = static_cast<std::size_t>(dataset.n());
    for (std::size_t t = 0; t < config.n_trees; ++t) {
        Rng rng(config.seed, t); // independent per-tree stream
        std::vector<std::size_t> rows(n);
        if (config.bootstrap) {
            for (auto& row : rows)
                row = static_cast<std::size_t>(rng.below(n));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        model.trees.push_back(train_tree_on_rows(dataset, tree_config, rows,
                                                 mtry > 0 ? &rng : nullptr, mtry));
    }
    return model;
}

double predict_forest(const ForestModel& model, const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (const auto& tree : model.trees)
        sum += predict_tree(tree, x);
    return sum / static_cast<double>(model.trees.size());
}

} // namespace sbd::learn
