#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbd/knowledge.hpp"

namespace sbd::synth {

struct SynthConfig {
    std::uint64_t seed = 0;
    std::size_t n_on = 1;  // on-topic users
    std::size_t n_off = 1; // off-topic users
    // Fraction of an on-topic user's token slots filled with gazetteer
    // surface forms; off-topic users stay below 2% accidental matches.
    double on_topic_fraction = 0.4;
};

struct SynthOutput {
    std::string posts_jsonl;
    std::string users_jsonl;
    std::string labels_csv; // header user_id,label
    std::string handles_tsv;
    std::string kb_json;
    std::string synonyms_json;
    std::string stopwords_txt;
};

// The politics gazetteer bundled with the generator (also shipped under
// data/); canonical names plus a few colloquial surface forms per entity.
std::vector<knowledge::Entity> bundled_entities();
knowledge::SynonymTable bundled_synonyms();
std::vector<std::string> bundled_stopwords();

// Deterministic two-class corpus: on-topic users write about gazetteer
// entities across all five time buckets, off-topic users write from a
// disjoint neutral vocabulary. Same config -> byte-identical output.
SynthOutput generate(const SynthConfig& config);

} // namespace sbd::synth
