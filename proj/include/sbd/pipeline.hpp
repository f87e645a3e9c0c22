#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbd/learn/selection.hpp"

namespace sbd::pipeline {

// Effective settings for one subcommand run. Every field can come from the
// config file or a same-named command-line flag (flags win); the resolved
// values are persisted as config.json inside each batch directory.
struct PipelineConfig {
    // Input files.
    std::string posts;
    std::string users;
    std::string handles;
    std::string stopwords;
    std::string kb;
    std::string synonyms;
    std::string labels;

    std::string out_dir = "out";
    std::string batch;        // input batch id; empty = latest suitable batch
    std::string models_batch; // evaluate: batch holding models/; empty = latest
    std::string user_id;      // top-entities target

    std::uint64_t seed = 42;
    double split_fraction = 0.6;
    std::string families = "nb,glm,lr,dt,rf,gbt,mlp";
    std::string params;    // per-family overrides: "dt.max_depth=10,rf.n_trees=50"
    std::string normalize; // ordered plan: "x10=log,x13=minmax,x12=clip:0:100"

    std::string reference_time; // ISO-8601 override; empty = newest post
    std::size_t post_cap = 3200;
    bool lowercase = true;
    bool skip_bad_lines = false;
    std::size_t top_k = 25;

    // synth
    std::size_t n_on = 268;
    std::size_t n_off = 314;
    double on_topic_fraction = 0.4;
};

// Batch ids sort lexicographically by creation time: UTC timestamp plus a
// two-digit suffix that increments within one second.
std::string make_batch_id(const std::string& out_dir, std::int64_t now_unix);

std::vector<learn::Family> parse_families(const std::string& families);
std::map<learn::Family, learn::ParamMap> parse_param_overrides(const std::string& params);

// Each command writes one new immutable batch directory under out_dir and
// returns its id (the only thing printed to stdout).
std::string cmd_ingest(const PipelineConfig& config);
std::string cmd_featurize(const PipelineConfig& config);
std::string cmd_train(const PipelineConfig& config);
std::string cmd_evaluate(const PipelineConfig& config);
std::string cmd_compare(const PipelineConfig& config);
std::string cmd_top_entities(const PipelineConfig& config);
std::string cmd_synth(const PipelineConfig& config);

} // namespace sbd::pipeline
