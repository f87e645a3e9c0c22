#include "sbd/learn/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbd/error.hpp"

namespace sbd::learn {

namespace {

// Inverse standard-normal CDF (Acklam's rational approximation, |relative
// error| < 1.15e-9 over (0, 1)).
double probit(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p <= 0.0 || p >= 1.0)
        throw DataError("probit requires p strictly inside (0, 1)");
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
}

double entropy_bits(double n0, double n1) {
    double n = n0 + n1;
    if (n0 == 0.0 || n1 == 0.0)
        return 0.0;
    double p0 = n0 / n;
    double p1 = n1 / n;
    return -p0 * std::log2(p0) - p1 * std::log2(p1);
}

struct Builder {
    const Dataset& dataset;
    const TreeConfig& config;
    Rng* feature_rng;
    std::size_t mtry;
    std::vector<TreeNode> nodes;
    std::size_t depth = 0;

    std::vector<Eigen::Index> split_features() {
        std::vector<Eigen::Index> features(static_cast<std::size_t>(dataset.d()));
        std::iota(features.begin(), features.end(), 0);
        if (feature_rng == nullptr || mtry == 0 || mtry >= features.size())
            return features;
        // Partial Fisher-Yates draw of mtry distinct features, then sorted so
        // the feature-index tie-break stays meaningful.
        for (std::size_t i = 0; i < mtry; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    feature_rng->below(static_cast<std::uint64_t>(
                                        features.size() - i)));
            std::swap(features[i], features[j]);
        }
        features.resize(mtry);
        std::sort(features.begin(), features.end());
        return features;
    }

    int build(const std::vector<std::size_t>& rows, std::size_t level) {
        TreeNode node;
        for (std::size_t row : rows) {
            if (dataset.y(static_cast<Eigen::Index>(row)) == 1.0)
                node.count1 += 1.0;
            else
                node.count0 += 1.0;
        }

        bool pure = node.count0 == 0.0 || node.count1 == 0.0;
        std::optional<SplitCandidate> split;
        if (!pure && level < config.max_depth)
            split = choose_split(dataset, rows, split_features(), config.min_gain);

        int index = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (!split) {
            depth = std::max(depth, level);
            return index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t row : rows) {
            if (dataset.X(static_cast<Eigen::Index>(row), split->feature) <= split->threshold)
                left_rows.push_back(row);
            else
                right_rows.push_back(row);
        }
        nodes[index].feature = split->feature;
        nodes[index].threshold = split->threshold;
        int left = build(left_rows, level + 1);
        nodes[index].left = left;
        int right = build(right_rows, level + 1);
        nodes[index].right = right;
        return index;
    }
};

double pessimistic_errors(const TreeNode& node, double confidence) {
    double n = node.count0 + node.count1;
    if (n == 0.0)
        return 0.0;
    double errors = std::min(node.count0, node.count1);
    return n * binomial_upper_bound(errors / n, n, confidence);
}

double subtree_error_estimate(const std::vector<TreeNode>& nodes, int index, double confidence) {
    const TreeNode& node = nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf())
        return pessimistic_errors(node, confidence);
    return subtree_error_estimate(nodes, node.left, confidence) +
           subtree_error_estimate(nodes, node.right, confidence);
}

// Bottom-up collapse of subtrees whose pessimistic error as a single leaf
// does not exceed the summed pessimistic error of their leaves.
void prune_subtree(std::vector<TreeNode>& nodes, int index, double confidence) {
    TreeNode& node = nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf())
        return;
    prune_subtree(nodes, node.left, confidence);
    prune_subtree(nodes, node.right, confidence);
    double as_subtree = subtree_error_estimate(nodes, node.left, confidence) +
                        subtree_error_estimate(nodes, node.right, confidence);
    if (pessimistic_errors(node, confidence) <= as_subtree) {
        node.feature = -1;
        node.left = -1;
        node.right = -1;
    }
}

// Rebuilds the arena without nodes orphaned by pruning and recomputes depth.
void compact(TreeModel& model) {
    std::vector<TreeNode> compacted;
    std::size_t depth = 0;
    // (old index, level) stack-free DFS preserving parent-before-child order.
    struct Frame {
        int old_index;
        int parent; // index in `compacted`, -1 for root
        bool is_left;
        std::size_t level;
    };
    std::vector<Frame> stack{{0, -1, false, 0}};
    while (!stack.empty()) {
        Frame frame = stack.back();
        stack.pop_back();
        const TreeNode& old_node = model.nodes[static_cast<std::size_t>(frame.old_index)];
        int new_index = static_cast<int>(compacted.size());
        compacted.push_back(old_node);
        if (frame.parent >= 0) {
            auto& parent = compacted[static_cast<std::size_t>(frame.parent)];
            (frame.is_left ? parent.left : parent.right) = new_index;
        }
        if (old_node.is_leaf()) {
            depth = std::max(depth, frame.level);
        } else {
            // Push right first so the left child is emitted first.
            stack.push_back({old_node.right, new_index, false, frame.level + 1});
            stack.push_back({old_node.left, new_index, true, frame.level + 1});
        }
    }
    model.nodes = std::move(compacted);
    model.depth = depth;
}

} // namespace

double binomial_upper_bound(double f, double n, double confidence) {
    double z = probit(1.0 - confidence);
    double z2 = z * z;
    double inside = f / n - f * f / n + z2 / (4.0 * n * n);
    double numerator = f + z2 / (2.0 * n) + z * std::sqrt(std::max(inside, 0.0));
    return std::min(1.0, numerator / (1.0 + z2 / n));
}

std::optional<SplitCandidate> choose_split(const Dataset& dataset,
                                           const std::vector<std::size_t>& rows,
                                           const std::vector<Eigen::Index>& features,
                                           double min_gain) {
    double total0 = 0.0, total1 = 0.0;
    for (std::size_t row : rows) {
        if (dataset.y(static_cast<Eigen::Index>(row)) == 1.0)
            total1 += 1.0;
        else
            total0 += 1.0;
    }
    double total = total0 + total1;
    double parent_entropy = entropy_bits(total0, total1);

    std::optional<SplitCandidate> best;
    std::vector<std::pair<double, int>> values; // (feature value, class)
    for (Eigen::Index feature : features) {
        values.clear();
        values.reserve(rows.size());
        for (std::size_t row : rows)
            values.emplace_back(dataset.X(static_cast<Eigen::Index>(row), feature),
                                dataset.y(static_cast<Eigen::Index>(row)) == 1.0 ? 1 : 0);
        std::sort(values.begin(), values.end());

        double left0 = 0.0, left1 = 0.0;
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            if (values[i].second == 1)
                left1 += 1.0;
            else
                left0 += 1.0;
            if (values[i].first == values[i + 1].first)
                continue; // thresholds only between distinct values

            double right0 = total0 - left0;
            double right1 = total1 - left1;
            double n_left = left0 + left1;
            double n_right = right0 + right1;
            double gain = parent_entropy -
                          (n_left / total) * entropy_bits(left0, left1) -
                          (n_right / total) * entropy_bits(right0, right1);
            if (gain < min_gain)
                continue;

            double split_info = entropy_bits(n_left, n_right);
            double ratio = split_info > 0.0 ? gain / split_info : 0.0;
            double threshold = (values[i].first + values[i + 1].first) / 2.0;

            bool better = false;
            if (!best) {
                better = true;
            } else if (ratio != best->gain_ratio) {
                better = ratio > best->gain_ratio;
            } else if (feature != best->feature) {
                better = feature < best->feature;
            } else {
                better = threshold < best->threshold;
            }
            if (better)
                best = SplitCandidate{static_cast<int>(feature), threshold, gain, ratio};
        }
    }
    return best;
}

TreeModel train_tree_on_rows(const Dataset& dataset, const TreeConfig& config,
                             const std::vector<std::size_t>& rows, Rng* feature_rng,
                             std::size_t mtry) {
    if (config.max_depth < 1)
        throw DataError("decision tree requires max_depth >= 1");
    if (config.confidence <= 0.0 || config.confidence > 0.5)
        throw DataError("decision tree requires confidence in (0, 0.5]");
    if (rows.empty())
        throw DataError("decision tree requires at least one training row");

    Builder builder{dataset, config, feature_rng, mtry, {}, 0};
    builder.build(rows, 0);

    TreeModel model;
    model.config = config;
    model.n_features = dataset.d();
    model.nodes = std::move(builder.nodes);
    model.depth = builder.depth;
    if (config.prune) {
        prune_subtree(model.nodes, 0, config.confidence);
        compact(model);
    }
    return model;
}

TreeModel train_tree(const Dataset& dataset, const TreeConfig& config) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(dataset.n()));
    std::iota(rows.begin(), rows.end(), 0);
    return train_tree_on_rows(dataset, config, rows, nullptr, 0);
}

double predict_tree(const TreeModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.n_features)
        throw DataError("tree predict: expected " + std::to_string(model.n_features) +
                        " features, got " + std::to_string(x.size()));
    const TreeNode* node = &model.nodes.front();
    while (!node->is_leaf())
        node = &model.nodes[static_cast<std::size_t>(
            x(node->feature) <= node->threshold ? node->left : node->right)];
    return node->count1 / (node->count0 + node->count1);
}

} // namespace sbd::learn
