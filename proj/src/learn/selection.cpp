#include "sbd/learn/selection.hpp"

#include <cmath>

#include "sbd/error.hpp"
#include "sbd/rng.hpp"

namespace sbd::learn {

namespace {

// Pulls one value out of the override map so leftovers can be reported.
class ParamReader {
public:
    ParamReader(Family family, const ParamMap& params)
        : family_(family), remaining_(params) {}

    double real(const std::string& key, double dflt) {
        auto it = remaining_.find(key);
        if (it == remaining_.end())
            return dflt;
        double v = it->second;
        remaining_.erase(it);
        return v;
    }

    std::size_t count(const std::string& key, std::size_t dflt) {
        auto it = remaining_.find(key);
        if (it == remaining_.end())
            return dflt;
        double v = it->second;
        remaining_.erase(it);
        if (v < 0.0 || v != std::floor(v))
            throw DataError("parameter \"" + key + "\" must be a non-negative whole number");
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& key, bool dflt) {
        auto it = remaining_.find(key);
        if (it == remaining_.end())
            return dflt;
        double v = it->second;
        remaining_.erase(it);
        return v != 0.0;
    }

    void finish() const {
        if (!remaining_.empty())
            throw DataError("unknown parameter \"" + remaining_.begin()->first +
                            "\" for family " + std::string(family_name(family_)));
    }

private:
    Family family_;
    ParamMap remaining_;
};

double population_stddev(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2)
        return 0.0;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

// Stratified folds: per-class shuffle, then deal members round-robin.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& dataset, std::size_t k,
                                                       std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(dataset.n());
    if (k < 2 || k > n)
        throw DataError("cross-validation needs 2 <= k <= n");

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i)
        by_class[dataset.y(static_cast<Eigen::Index>(i)) == 1.0 ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < k)
            throw DataError("class " + std::to_string(c) + " has only " +
                            std::to_string(by_class[c].size()) +
                            " members; use a smaller k");

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j)
            folds[j % k].push_back(members[j]);
    }
    for (auto& fold : folds)
        std::sort(fold.begin(), fold.end());
    return folds;
}

} // namespace

ParamMap default_params(Family family) {
    switch (family) {
    case Family::nb:
        return {{"bins", 10}, {"laplace", 1.0}};
    case Family::glm:
        return {{"lambda", 1e-3}, {"alpha", 0.5},   {"standardize", 1},
                {"max_iter", 1000}, {"tol", 1e-9}};
    case Family::lr:
        return {{"max_iter", 100}, {"tol", 1e-8}};
    case Family::dt:
        return {{"max_depth", 20}, {"min_gain", 0.05}, {"confidence", 0.1}, {"prune", 1}};
    case Family::rf:
        return {{"n_trees", 100},  {"max_depth", 10}, {"min_gain", 0},
                {"confidence", 0.1}, {"prune", 0},     {"bootstrap", 1},
                {"feature_subsample", 1}};
    case Family::gbt:
        return {{"n_trees", 20},    {"max_depth", 10}, {"min_gain", 0},
                {"confidence", 0.1}, {"prune", 0}};
    case Family::mlp:
        return {{"hidden1", 16},      {"hidden2", 16}, {"activation", 0},
                {"maxout_pieces", 2}, {"max_iter", 200}, {"tol", 1e-7},
                {"learning_rate", 0.1}, {"l2", 1e-4},   {"dropout", 0}};
    }
    throw DataError("unknown model family value");
}

Model train_family(Family family, const Dataset& dataset, const ParamMap& params,
                   std::uint64_t seed) {
    ParamMap merged = default_params(family);
    for (const auto& [key, value] : params) {
        if (merged.find(key) == merged.end())
            throw DataError("unknown parameter \"" + key + "\" for family " +
                            std::string(family_name(family)));
        merged[key] = value;
    }
    ParamReader reader(family, merged);

    switch (family) {
    case Family::nb: {
        NBConfig config;
        config.bins = reader.count("bins", config.bins);
        config.laplace = reader.real("laplace", config.laplace);
        reader.finish();
        return train_naive_bayes(dataset, config);
    }
    case Family::glm: {
        GLMConfig config;
        config.lambda = reader.real("lambda", config.lambda);
        config.alpha = reader.real("alpha", config.alpha);
        config.standardize = reader.flag("standardize", config.standardize);
        config.max_iter = reader.count("max_iter", config.max_iter);
        config.tol = reader.real("tol", config.tol);
        reader.finish();
        return train_glm_elastic(dataset, config);
    }
    case Family::lr: {
        LogisticConfig config;
        config.max_iter = reader.count("max_iter", config.max_iter);
        config.tol = reader.real("tol", config.tol);
        reader.finish();
        return train_logistic(dataset, config);
    }
    case Family::dt: {
        TreeConfig config;
        config.max_depth = reader.count("max_depth", config.max_depth);
        config.min_gain = reader.real("min_gain", config.min_gain);
        config.confidence = reader.real("confidence", config.confidence);
        config.prune = reader.flag("prune", config.prune);
        reader.finish();
        return train_tree(dataset, config);
    }
    case Family::rf: {
        ForestConfig config;
        config.n_trees = reader.count("n_trees", config.n_trees);
        config.max_depth = reader.count("max_depth", config.max_depth);
        config.min_gain = reader.real("min_gain", config.min_gain);
        config.confidence = reader.real("confidence", config.confidence);
        config.prune = reader.flag("prune", config.prune);
        config.bootstrap = reader.flag("bootstrap", config.bootstrap);
        config.feature_subsample = reader.flag("feature_subsample", config.feature_subsample);
        config.seed = seed;
        reader.finish();
        return train_forest(dataset, config);
    }
    case Family::gbt: {
        GBTConfig config;
        config.n_trees = reader.count("n_trees", config.n_trees);
        config.max_depth = reader.count("max_depth", config.max_depth);
        config.min_gain = reader.real("min_gain", config.min_gain);
        config.confidence = reader.real("confidence", config.confidence);
        config.prune = reader.flag("prune", config.prune);
        config.seed = seed;
        reader.finish();
        return train_gbt(dataset, config);
    }
    case Family::mlp: {
        MLPConfig config;
        std::size_t hidden1 = reader.count("hidden1", 16);
        std::size_t hidden2 = reader.count("hidden2", 16);
        if (hidden1 == 0)
            throw DataError("mlp hidden1 must be positive");
        config.hidden = hidden2 > 0 ? std::vector<std::size_t>{hidden1, hidden2}
                                    : std::vector<std::size_t>{hidden1};
        std::size_t activation = reader.count("activation", 0);
        if (activation > 2)
            throw DataError("mlp activation code must be 0 (rectifier), 1 (tanh) or 2 (maxout)");
        config.activation = static_cast<Activation>(activation);
        config.maxout_pieces = reader.count("maxout_pieces", config.maxout_pieces);
        config.max_iter = reader.count("max_iter", config.max_iter);
        config.tol = reader.real("tol", config.tol);
        config.learning_rate = reader.real("learning_rate", config.learning_rate);
        config.l2 = reader.real("l2", config.l2);
        config.dropout = reader.real("dropout", config.dropout);
        config.seed = seed;
        reader.finish();
        return train_mlp(dataset, config);
    }
    }
    throw DataError("unknown model family value");
}

CvResult cross_validate(Family family, const ParamMap& params, const Dataset& dataset,
                        std::size_t k, std::uint64_t seed, eval::Metric metric) {
    const auto folds = stratified_folds(dataset, k, seed);

    CvResult result;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train_rows;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f)
                train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
        std::sort(train_rows.begin(), train_rows.end());

        const Dataset train = dataset.subset(train_rows);
        const Dataset test = dataset.subset(folds[f]);
        const Model model = train_family(family, train, params, Rng::mix(seed, f + 1));

        std::vector<int> labels(static_cast<std::size_t>(test.n()));
        for (Eigen::Index i = 0; i < test.n(); ++i)
            labels[static_cast<std::size_t>(i)] = test.y(i) == 1.0 ? 1 : 0;
        result.fold_scores.push_back(
            eval::compute_metric(metric, predict_all(model, test.X), labels));
    }

    double sum = 0.0;
    for (double s : result.fold_scores)
        sum += s;
    result.mean = sum / static_cast<double>(result.fold_scores.size());
    result.stddev = population_stddev(result.fold_scores, result.mean);
    return result;
}

SearchResult grid_search(Family family, const std::map<std::string, std::vector<double>>& grid,
                         const Dataset& dataset, std::size_t k, std::uint64_t seed,
                         eval::Metric metric) {
    if (grid.empty())
        throw DataError("grid search needs at least one parameter");
    for (const auto& [key, values] : grid)
        if (values.empty())
            throw DataError("grid parameter \"" + key + "\" has an empty value list");

    std::vector<std::string> names;
    for (const auto& [key, values] : grid)
        names.push_back(key);

    SearchResult result;
    std::vector<std::size_t> cursor(names.size(), 0);
    bool done = false;
    while (!done) {
        ParamMap point;
        for (std::size_t i = 0; i < names.size(); ++i)
            point[names[i]] = grid.at(names[i])[cursor[i]];
        result.table.push_back({point, cross_validate(family, point, dataset, k, seed, metric)});

        // Advance like an odometer with the last name varying fastest.
        std::size_t i = names.size();
        while (i-- > 0) {
            if (++cursor[i] < grid.at(names[i]).size())
                break;
            cursor[i] = 0;
            if (i == 0)
                done = true;
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i)
        if (result.table[i].result.mean > result.table[best].result.mean)
            best = i; // ties keep the earlier configuration
    result.best = result.table[best].params;
    return result;
}

SearchResult random_search(Family family, const std::map<std::string, SearchSpec>& space,
                           std::size_t n_trials, const Dataset& dataset, std::size_t k,
                           std::uint64_t seed, eval::Metric metric) {
    if (space.empty())
        throw DataError("random search needs at least one parameter");
    if (n_trials < 1)
        throw DataError("random search needs at least one trial");
    for (const auto& [key, spec] : space) {
        if (spec.range.has_value() && spec.range->first > spec.range->second)
            throw DataError("parameter \"" + key + "\" has an empty range (lo > hi)");
        if (!spec.range.has_value() && spec.choices.empty())
            throw DataError("parameter \"" + key + "\" has neither a range nor choices");
    }

    Rng rng(seed);
    SearchResult result;
    for (std::size_t t = 0; t < n_trials; ++t) {
        ParamMap point;
        for (const auto& [key, spec] : space) {
            if (!spec.choices.empty())
                point[key] = spec.choices[rng.below(spec.choices.size())];
            else
                point[key] = rng.uniform(spec.range->first, spec.range->second);
        }
        result.table.push_back({point, cross_validate(family, point, dataset, k, seed, metric)});
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i)
        if (result.table[i].result.mean > result.table[best].result.mean)
            best = i;
    result.best = result.table[best].params;
    return result;
}

} // namespace sbd::learn
