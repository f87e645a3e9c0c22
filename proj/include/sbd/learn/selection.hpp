#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbd/eval/metrics.hpp"
#include "sbd/learn/dataset.hpp"
#include "sbd/learn/model.hpp"

namespace sbd::learn {

// Hyperparameters as name -> numeric value; integral settings are given as
// whole numbers, on/off switches as 0/1, and the mlp activation as a code
// (0 = rectifier, 1 = tanh, 2 = maxout).
using ParamMap = std::map<std::string, double>;

// Per-family defaults applied before the overrides in params.
ParamMap default_params(Family family);

// Trains one family with defaults overridden by params; unknown parameter
// names raise a data error.
Model train_family(Family family, const Dataset& dataset, const ParamMap& params = {},
                   std::uint64_t seed = 0);

struct CvResult {
    std::vector<double> fold_scores;
    double mean = 0.0;
    double stddev = 0.0;
};

// Stratified k-fold cross-validation (per-class shuffle, round-robin deal).
// Every class needs at least k members so each training fold sees both.
CvResult cross_validate(Family family, const ParamMap& params, const Dataset& dataset,
                        std::size_t k, std::uint64_t seed,
                        eval::Metric metric = eval::Metric::accuracy);

struct ScoredParams {
    ParamMap params;
    CvResult result;
};

struct SearchResult {
    ParamMap best;
    std::vector<ScoredParams> table; // every evaluated configuration, in order
};

// Full Cartesian product over the value lists; parameters enumerate in
// lexicographic name order and ties keep the earliest configuration.
SearchResult grid_search(Family family, const std::map<std::string, std::vector<double>>& grid,
                         const Dataset& dataset, std::size_t k, std::uint64_t seed,
                         eval::Metric metric = eval::Metric::accuracy);

// Either a continuous range [lo, hi] or an explicit list of choices.
struct SearchSpec {
    std::optional<std::pair<double, double>> range;
    std::vector<double> choices;

    static SearchSpec between(double lo, double hi) { return {{{lo, hi}}, {}}; }
    static SearchSpec among(std::vector<double> values) { return {std::nullopt, std::move(values)}; }
};

SearchResult random_search(Family family, const std::map<std::string, SearchSpec>& space,
                           std::size_t n_trials, const Dataset& dataset, std::size_t k,
                           std::uint64_t seed, eval::Metric metric = eval::Metric::accuracy);

} // namespace sbd::learn
