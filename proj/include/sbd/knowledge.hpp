#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sbd/corpus.hpp"

namespace sbd::knowledge {

// Entity subtypes recognised by the gazetteer. Serialized names match the
// strings used in kb.json exactly.
enum class Subtype {
    politician,
    political_party,
    organization,
    event,
    political_slogan,
    voter,
    person,
    ontology,
};

std::string_view subtype_name(Subtype subtype);
Subtype subtype_from_name(std::string_view name); // throws DataError on unknown names

struct Entity {
    std::string entity_id;
    std::string canonical_name;
    Subtype subtype = Subtype::person;
    // Surface forms as stored: canonical_name first, then the remaining
    // forms in input order, deduplicated by their case-folded rendering.
    std::vector<std::string> surface_forms;
};

// Immutable gazetteer with a token-based surface index.
class KnowledgeBase {
public:
    // Validates and indexes the entities; throws DataError on duplicate
    // entity ids, empty surface forms, or a surface form shared by two
    // entities (the message names both entity ids). The canonical name is
    // always unioned into each entity's surface forms.
    static KnowledgeBase make(std::vector<Entity> entities);

    const std::vector<Entity>& entities() const { return entities_; }
    const Entity& entity(const std::string& entity_id) const; // throws DataError if absent
    bool contains(const std::string& entity_id) const { return by_id_.count(entity_id) > 0; }
    std::size_t size() const { return entities_.size(); }

    // Longest surface form, measured in whitespace tokens.
    std::size_t max_surface_tokens() const { return max_surface_tokens_; }

    // Case-folded single-spaced surface rendering ("civil rights act") -> entity_id.
    const std::unordered_map<std::string, std::string>& surface_index() const {
        return surface_index_;
    }

private:
    KnowledgeBase() = default;

    std::vector<Entity> entities_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::string> surface_index_;
    std::size_t max_surface_tokens_ = 0;
};

// Reads a kb.json document: {"entities": [{"id", "name", "subtype",
// "surface_forms": [...]}, ...]}.
KnowledgeBase load_kb(std::istream& in);

// Synonym lists keyed by entity_id, as read from synonyms.json:
// {"<entity_id>": ["alias", ...], ...}.
using SynonymTable = std::unordered_map<std::string, std::vector<std::string>>;

SynonymTable parse_synonyms_json(std::istream& in);

// Returns a new knowledge base whose entities carry the extra surface forms
// (set union on the case-folded rendering); the input base is untouched and
// the merged index passes the same validation as construction. Unknown
// entity ids are an error.
KnowledgeBase merge_synonyms(const KnowledgeBase& kb, const SynonymTable& synonyms);

struct EntityMention {
    std::string entity_id;
    std::size_t token_start = 0; // first matched token position
    std::size_t token_end = 0;   // one past the last matched token
    // The matched tokens, case-folded and joined with single spaces; always
    // a key of the surface index.
    std::string matched_surface;
};

// Scans whitespace tokens of cleansed text left to right, preferring the
// longest surface match at each position; matched tokens are consumed, so
// mentions never overlap.
std::vector<EntityMention> annotate_text(std::string_view txt, const KnowledgeBase& kb);

// Per-source annotations for one user's corpus.
struct CorpusAnnotations {
    // post_mentions[i] corresponds to corpus.posts[i].
    std::vector<std::vector<EntityMention>> post_mentions;
    std::vector<EntityMention> profile_mentions;
};

CorpusAnnotations annotate_corpus(const corpus::UserCorpus& corpus, const KnowledgeBase& kb);

// All mentions of a user's annotations in one list (posts in order, then profile).
std::vector<EntityMention> flatten(const CorpusAnnotations& annotations);

struct EntityCount {
    std::string entity_id;
    std::string canonical_name;
    Subtype subtype = Subtype::person;
    std::uint64_t frequency = 0;
};

// Ranks entities by mention frequency descending with canonical_name
// ascending as the tie-break; at most k rows. k must be >= 1.
std::vector<EntityCount> top_entities(const std::vector<EntityMention>& mentions,
                                      const KnowledgeBase& kb,
                                      std::size_t k);

} // namespace sbd::knowledge
