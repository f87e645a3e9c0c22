#include "sbd/learn/gbt.hpp"

#include <algorithm>
#include <numeric>

#include "sbd/error.hpp"
#include "sbd/rng.hpp"

namespace sbd::learn {

namespace {

// Euclidean projection onto {w : w >= 0, sum(w) = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index m = v.size();
    std::vector<double> sorted(v.data(), v.data() + m);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    double running = 0.0;
    double theta = 0.0;
    Eigen::Index support = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        running += sorted[static_cast<std::size_t>(j)];
        double candidate = (running - 1.0) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) {
            theta = candidate;
            support = j + 1;
        }
    }
    (void)support;

    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i)
        w(i) = std::max(v(i) - theta, 0.0);
    return w;
}

double mean_squared_error(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& weights) {
    return (scores * weights - y).squaredNorm() / static_cast<double>(y.size());
}

} // namespace

Eigen::VectorXd optimize_ensemble_weights(const Eigen::MatrixXd& tree_scores,
                                          const Eigen::VectorXd& y) {
    const Eigen::Index m = tree_scores.cols();
    if (m < 1)
        throw DataError("ensemble weight optimization needs at least one tree");
    if (tree_scores.rows() != y.size())
        throw DataError("ensemble weight optimization: score rows do not match labels");
    if (m == 1)
        return Eigen::VectorXd::Ones(1);

    Eigen::VectorXd uniform = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));

    // KKT system of min |y - S*a|^2 subject to 1'a = 1:
    //   [2S'S  1] [a ]   [2S'y]
    //   [1'    0] [nu] = [1   ]
    auto solve_kkt = [&](double jitter) -> Eigen::VectorXd {
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
        kkt.topLeftCorner(m, m) =
            2.0 * (tree_scores.transpose() * tree_scores +
                   jitter * Eigen::MatrixXd::Identity(m, m));
        kkt.topRightCorner(m, 1).setOnes();
        kkt.bottomLeftCorner(1, m).setOnes();
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = 2.0 * tree_scores.transpose() * y;
        rhs(m) = 1.0;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible())
            return Eigen::VectorXd();
        Eigen::VectorXd solution = lu.solve(rhs);
        if (!solution.allFinite())
            return Eigen::VectorXd();
        return solution.head(m);
    };

    Eigen::VectorXd alpha = solve_kkt(0.0);
    if (alpha.size() == 0)
        alpha = solve_kkt(1e-8);
    if (alpha.size() == 0)
        alpha = uniform;

    if ((alpha.array() < 0.0).any())
        alpha = project_to_simplex(alpha);

    // The equality-constrained optimum can leave the simplex; after the
    // projection, fall back to uniform weights whenever they fit better.
    if (mean_squared_error(tree_scores, y, alpha) >
        mean_squared_error(tree_scores, y, uniform))
        alpha = uniform;
    return alpha;
}

GBTModel train_gbt(const Dataset& dataset, const GBTConfig& config) {
    if (config.n_trees < 1)
        throw DataError("gradient-boosted ensemble requires at least one tree");

    TreeConfig tree_config{config.max_depth, config.min_gain, config.confidence, config.prune};

    GBTModel model;
    model.config = config;
    model.trees.reserve(config.n_trees);

    const auto n = static_cast<std::size_t>(dataset.n());
    for (std::size_t t = 0; t < config.n_trees; ++t) {
        Rng rng(config.seed, t);
        std::vector<std::size_t> rows(n);
        for (auto& row : rows)
            row = static_cast<std::size_t>(rng.below(n));
        model.trees.push_back(train_tree_on_rows(dataset, tree_config, rows, nullptr, 0));
    }

    Eigen::MatrixXd scores(dataset.n(), static_cast<Eigen::Index>(config.n_trees));
    for (std::size_t t = 0; t < config.n_trees; ++t)
        for (Eigen::Index i = 0; i < dataset.n(); ++i)
            scores(i, static_cast<Eigen::Index>(t)) =
                predict_tree(model.trees[t], dataset.X.row(i).transpose());
    model.weights = optimize_ensemble_weights(scores, dataset.y);
    return model;
}

double predict_gbt(const GBTModel& model, const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (std::size_t t = 0; t < model.trees.size(); ++t)
        sum += model.weights(static_cast<Eigen::Index>(t)) * predict_tree(model.trees[t], x);
    return sum;
}

} // namespace sbd::learn
