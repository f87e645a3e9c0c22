#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "sbd/error.hpp"
#include "sbd/learn/forest.hpp"
#include "sbd/learn/gbt.hpp"
#include "sbd/learn/model.hpp"
#include "sbd/learn/tree.hpp"

using namespace sbd;
using learn::Dataset;

namespace {

// A degenerate one-leaf tree that always scores count1 / (count0 + count1).
learn::TreeModel leaf_stub(double count0, double count1, Eigen::Index n_features) {
    learn::TreeModel model;
    model.n_features = n_features;
    learn::TreeNode node;
    node.count0 = count0;
    node.count1 = count1;
    model.nodes.push_back(node);
    model.depth = 0;
    return model;
}

double mse(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y,
           const Eigen::VectorXd& weights) {
    return (y - scores * weights).squaredNorm() / static_cast<double>(y.size());
}

} // namespace

TEST_CASE("a single unbagged tree forest is the plain tree") {
    Rng rng(41);
    auto dataset = oracle::random_dataset(rng, 30, 3, 1.0);

    learn::ForestConfig forest_config;
    forest_config.n_trees = 1;
    forest_config.max_depth = 10;
    forest_config.min_gain = 0.0;
    forest_config.confidence = 0.1;
    forest_config.prune = false;
    forest_config.bootstrap = false;
    forest_config.feature_subsample = false;
    forest_config.seed = 5;

    learn::TreeConfig tree_config;
    tree_config.max_depth = 10;
    tree_config.min_gain = 0.0;
    tree_config.confidence = 0.1;
    tree_config.prune = false;

    auto forest = learn::train_forest(dataset, forest_config);
    auto tree = learn::train_tree(dataset, tree_config);

    REQUIRE(forest.trees.size() == 1);
    REQUIRE(forest.trees[0].nodes.size() == tree.nodes.size());
    CHECK(forest.trees[0].depth == tree.depth);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        CHECK(forest.trees[0].nodes[i].feature == tree.nodes[i].feature);
        CHECK(forest.trees[0].nodes[i].threshold == tree.nodes[i].threshold);
        CHECK(forest.trees[0].nodes[i].left == tree.nodes[i].left);
        CHECK(forest.trees[0].nodes[i].right == tree.nodes[i].right);
        CHECK(forest.trees[0].nodes[i].count0 == tree.nodes[i].count0);
        CHECK(forest.trees[0].nodes[i].count1 == tree.nodes[i].count1);
    }
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(3);
        x << rng.normal(), rng.normal(), rng.normal();
        CHECK(learn::predict_forest(forest, x) == learn::predict_tree(tree, x));
    }
}

TEST_CASE("forest prediction is the exact mean of member trees") {
    learn::ForestModel forest;
    forest.trees.push_back(leaf_stub(4, 1, 2)); // 0.2
    forest.trees.push_back(leaf_stub(3, 2, 2)); // 0.4
    forest.trees.push_back(leaf_stub(2, 3, 2)); // 0.6
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const double s0 = learn::predict_tree(forest.trees[0], x);
    const double s1 = learn::predict_tree(forest.trees[1], x);
    const double s2 = learn::predict_tree(forest.trees[2], x);
    CHECK(s0 == 0.2);
    CHECK(s1 == 0.4);
    CHECK(s2 == 0.6);
    CHECK(learn::predict_forest(forest, x) == (s0 + s1 + s2) / 3.0);
}

TEST_CASE("weighted ensemble prediction is the exact weighted sum") {
    learn::GBTModel model;
    model.trees.push_back(leaf_stub(4, 1, 2));
    model.trees.push_back(leaf_stub(3, 2, 2));
    model.trees.push_back(leaf_stub(2, 3, 2));
    model.weights.resize(3);
    model.weights << 0.2, 0.3, 0.5;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    double expected = 0.0;
    for (int t = 0; t < 3; ++t)
        expected += model.weights(t) * learn::predict_tree(model.trees[t], x);
    CHECK(learn::predict_gbt(model, x) == expected);
}

TEST_CASE("weight optimization: single member gets weight one") {
    Eigen::MatrixXd scores(4, 1);
    scores << 0.1, 0.9, 0.4, 0.6;
    Eigen::VectorXd y(4);
    y << 0, 1, 0, 1;
    auto weights = learn::optimize_ensemble_weights(scores, y);
    REQUIRE(weights.size() == 1);
    CHECK(weights(0) == 1.0);
}

TEST_CASE("weight optimization: convex combination on random score tables") {
    Rng rng(47);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.below(30));
        const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.below(4));
        Eigen::MatrixXd scores(n, m);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = static_cast<double>(rng.below(2));
            for (Eigen::Index t = 0; t < m; ++t)
                scores(i, t) = rng.next_double();
        }
        auto weights = learn::optimize_ensemble_weights(scores, y);
        REQUIRE(weights.size() == m);
        CHECK(weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(weights.minCoeff() >= 0.0);
        // Never worse than the plain average.
        Eigen::VectorXd uniform = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
        CHECK(mse(scores, y, weights) <= mse(scores, y, uniform) + 1e-12);
    }
}

TEST_CASE("weight optimization: identical members share the weight") {
    Rng rng(53);
    Eigen::VectorXd s(6);
    for (Eigen::Index i = 0; i < 6; ++i)
        s(i) = rng.next_double();
    Eigen::MatrixXd scores(6, 2);
    scores.col(0) = s;
    scores.col(1) = s;
    Eigen::VectorXd y(6);
    y << 0, 1, 1, 0, 1, 0;
    auto weights = learn::optimize_ensemble_weights(scores, y);
    CHECK(weights(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(weights(1) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("weight optimization: a perfect member takes everything") {
    Eigen::VectorXd y(6);
    y << 0, 1, 1, 0, 1, 0;
    Eigen::MatrixXd scores(6, 2);
    scores.col(0) = y;
    scores.col(1) = Eigen::VectorXd::Constant(6, 0.5);
    auto weights = learn::optimize_ensemble_weights(scores, y);
    CHECK(weights(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(weights(1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mse(scores, y, weights) <= 1e-18);
}

// Solves min |y - S*alpha|^2 s.t. sum(alpha) = 1 without the non-negativity
// constraint; when this point is already feasible it is the global optimum
// over the whole simplex and the optimizer must match it.
Eigen::VectorXd equality_constrained_weights(const Eigen::MatrixXd& scores,
                                             const Eigen::VectorXd& y) {
    const Eigen::Index m = scores.cols();
    Eigen::MatrixXd kktized(m + 1, m + 1);
    kktized.topLeftCorner(m, m) = 2.0 * scores.transpose() * scores;
    kktized.topRightCorner(m, 1).setOnes();
    kktized.bottomLeftCorner(1, m).setOnes();
    kktized(m, m) = 0.0;
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = 2.0 * scores.transpose() * y;
    rhs(m) = 1.0;
    return kktized.fullPivLu().solve(rhs).head(m);
}

TEST_CASE("weight optimization attains the simplex optimum when it is interior") {
    Rng rng(59);
    int interior_cases = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.below(20));
        const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.below(2));
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i)
            y(i) = static_cast<double>(rng.below(2));
        Eigen::MatrixXd scores(n, m);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index t = 0; t < m; ++t)
                scores(i, t) = rng.next_double();

        auto weights = learn::optimize_ensemble_weights(scores, y);
        if (equality_constrained_weights(scores, y).minCoeff() < 0.0) {
            // The clipped solution only promises to beat the uniform average.
            Eigen::VectorXd uniform =
                Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
            CHECK(mse(scores, y, weights) <= mse(scores, y, uniform) + 1e-12);
            continue;
        }
        ++interior_cases;

        double best_grid = std::numeric_limits<double>::infinity();
        if (m == 2) {
            for (int k = 0; k <= 100; ++k) {
                Eigen::VectorXd alpha(2);
                alpha << k / 100.0, 1.0 - k / 100.0;
                best_grid = std::min(best_grid, mse(scores, y, alpha));
            }
        } else {
            for (int a = 0; a <= 20; ++a)
                for (int b = 0; a + b <= 20; ++b) {
                    Eigen::VectorXd alpha(3);
                    alpha << a / 20.0, b / 20.0, 1.0 - a / 20.0 - b / 20.0;
                    best_grid = std::min(best_grid, mse(scores, y, alpha));
                }
        }
        CHECK(mse(scores, y, weights) <= best_grid + 1e-9);
    }
    // The filter must not silently skip everything.
    CHECK(interior_cases >= 10);
}

TEST_CASE("trained weighted ensemble: simplex weights, no worse than uniform") {
    Rng rng(61);
    auto dataset = oracle::random_dataset(rng, 60, 3, 0.8);

    learn::GBTConfig config;
    config.n_trees = 5;
    config.max_depth = 3;
    config.seed = 9;
    auto model = learn::train_gbt(dataset, config);

    REQUIRE(model.trees.size() == 5);
    REQUIRE(model.weights.size() == 5);
    CHECK(model.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.weights.minCoeff() >= 0.0);

    // Recompute member scores on the training rows and compare combinations.
    Eigen::MatrixXd scores(dataset.n(), 5);
    for (Eigen::Index i = 0; i < dataset.n(); ++i)
        for (int t = 0; t < 5; ++t)
            scores(i, t) =
                learn::predict_tree(model.trees[static_cast<std::size_t>(t)],
                                    dataset.X.row(i).transpose());
    Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
    CHECK(mse(scores, dataset.y, model.weights) <= mse(scores, dataset.y, uniform) + 1e-12);

    // Full prediction agrees with the weighted member sum.
    Eigen::VectorXd x = dataset.X.row(0).transpose();
    double expected = 0.0;
    for (int t = 0; t < 5; ++t)
        expected += model.weights(t) *
                    learn::predict_tree(model.trees[static_cast<std::size_t>(t)], x);
    CHECK(learn::predict_gbt(model, x) == expected);
}

TEST_CASE("ensembles are deterministic for a fixed seed") {
    Rng rng(67);
    auto dataset = oracle::random_dataset(rng, 50, 4, 0.7);

    learn::ForestConfig forest_config;
    forest_config.n_trees = 7;
    forest_config.max_depth = 4;
    forest_config.seed = 123;
    auto f1 = learn::train_forest(dataset, forest_config);
    auto f2 = learn::train_forest(dataset, forest_config);
    CHECK(learn::model_to_json(learn::Model(f1)) == learn::model_to_json(learn::Model(f2)));

    learn::GBTConfig gbt_config;
    gbt_config.n_trees = 6;
    gbt_config.max_depth = 3;
    gbt_config.seed = 321;
    auto g1 = learn::train_gbt(dataset, gbt_config);
    auto g2 = learn::train_gbt(dataset, gbt_config);
    CHECK(learn::model_to_json(learn::Model(g1)) == learn::model_to_json(learn::Model(g2)));

    // A different seed reshuffles the bootstrap draws.
    gbt_config.seed = 322;
    auto g3 = learn::train_gbt(dataset, gbt_config);
    CHECK(learn::model_to_json(learn::Model(g1)) != learn::model_to_json(learn::Model(g3)));
}

TEST_CASE("bagging varies member trees") {
    Rng rng(71);
    auto dataset = oracle::random_dataset(rng, 80, 3, 0.5);
    learn::ForestConfig config;
    config.n_trees = 10;
    config.max_depth = 6;
    config.seed = 77;
    auto forest = learn::train_forest(dataset, config);
    REQUIRE(forest.trees.size() == 10);
    bool any_differ = false;
    for (std::size_t t = 1; t < forest.trees.size() && !any_differ; ++t) {
        if (forest.trees[t].nodes.size() != forest.trees[0].nodes.size()) {
            any_differ = true;
            break;
        }
        for (std::size_t i = 0; i < forest.trees[t].nodes.size(); ++i)
            if (forest.trees[t].nodes[i].threshold != forest.trees[0].nodes[i].threshold ||
                forest.trees[t].nodes[i].feature != forest.trees[0].nodes[i].feature) {
                any_differ = true;
                break;
            }
    }
    CHECK(any_differ);

    // Scores stay inside [0, 1].
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
        double s = learn::predict_forest(forest, dataset.X.row(i).transpose());
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("degenerate ensemble requests are rejected") {
    Rng rng(73);
    auto dataset = oracle::random_dataset(rng, 20, 2, 1.0);
    learn::GBTConfig config;
    config.n_trees = 0;
    CHECK_THROWS_AS(learn::train_gbt(dataset, config), DataError);
    learn::ForestConfig forest_config;
    forest_config.n_trees = 0;
    CHECK_THROWS_AS(learn::train_forest(dataset, forest_config), DataError);
}
