#include "sbd/knowledge.hpp"

#include <algorithm>
#include <istream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sbd/error.hpp"
#include "sbd/text.hpp"

namespace sbd::knowledge {

using nlohmann::json;

namespace {

constexpr std::pair<Subtype, std::string_view> kSubtypeNames[] = {
    {Subtype::politician, "Politician"},
    {Subtype::political_party, "PoliticalParty"},
    {Subtype::organization, "Organization"},
    {Subtype::event, "Event"},
    {Subtype::political_slogan, "Political_Slogan"},
    {Subtype::voter, "Voter"},
    {Subtype::person, "Person"},
    {Subtype::ontology, "Ontology"},
};

// Case-folded, single-spaced rendering used as the index key.
std::string fold_surface(std::string_view surface) {
    return text::fold_case(text::join_tokens(text::split_tokens(surface)));
}

} // namespace

std::string_view subtype_name(Subtype subtype) {
    for (auto [value, name] : kSubtypeNames)
        if (value == subtype)
            return name;
    throw DataError("unknown entity subtype value");
}

Subtype subtype_from_name(std::string_view name) {
    for (auto [value, candidate] : kSubtypeNames)
        if (candidate == name)
            return value;
    throw DataError("unknown entity subtype \"" + std::string(name) + "\"");
}

KnowledgeBase KnowledgeBase::make(std::vector<Entity> entities) {
    KnowledgeBase kb;
    kb.entities_ = std::move(entities);
    for (std::size_t i = 0; i < kb.entities_.size(); ++i) {
        Entity& entity = kb.entities_[i];
        if (entity.entity_id.empty())
            throw DataError("entity with empty entity_id");
        if (!kb.by_id_.emplace(entity.entity_id, i).second)
            throw DataError("duplicate entity_id \"" + entity.entity_id + "\"");
        if (entity.canonical_name.empty())
            throw DataError("entity \"" + entity.entity_id + "\" has an empty canonical_name");

        // Canonical name first, remaining forms in input order, unique by
        // case-folded rendering.
        std::vector<std::string> forms;
        std::unordered_set<std::string> folded_seen;
        forms.push_back(entity.canonical_name);
        folded_seen.insert(fold_surface(entity.canonical_name));
        for (auto& surface : entity.surface_forms) {
            std::string key = fold_surface(surface);
            if (key.empty())
                throw DataError("entity \"" + entity.entity_id + "\" has an empty surface form");
            if (folded_seen.insert(key).second)
                forms.push_back(std::move(surface));
        }
        entity.surface_forms = std::move(forms);

        for (const auto& surface : entity.surface_forms) {
            std::string key = fold_surface(surface);
            if (key.empty())
                throw DataError("entity \"" + entity.entity_id + "\" has an empty surface form");
            auto [it, inserted] = kb.surface_index_.emplace(key, entity.entity_id);
            if (!inserted && it->second != entity.entity_id)
                throw DataError("surface form \"" + key + "\" maps to both \"" + it->second +
                                "\" and \"" + entity.entity_id + "\"");
            std::size_t tokens = text::split_tokens(key).size();
            kb.max_surface_tokens_ = std::max(kb.max_surface_tokens_, tokens);
        }
    }
    return kb;
}

const Entity& KnowledgeBase::entity(const std::string& entity_id) const {
    auto it = by_id_.find(entity_id);
    if (it == by_id_.end())
        throw DataError("unknown entity_id \"" + entity_id + "\"");
    return entities_[it->second];
}

KnowledgeBase load_kb(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw DataError(std::string("kb.json: malformed JSON: ") + err.what());
    }
    if (!doc.is_object() || !doc.contains("entities") || !doc["entities"].is_array())
        throw DataError("kb.json: expected an object with an \"entities\" array");

    std::vector<Entity> entities;
    for (const auto& record : doc["entities"]) {
        if (!record.is_object())
            throw DataError("kb.json: entity record is not an object");
        for (const char* key : {"id", "name", "subtype"})
            if (!record.contains(key) || !record[key].is_string())
                throw DataError(std::string("kb.json: entity missing string field \"") + key +
                                "\"");
        Entity entity;
        entity.entity_id = record["id"].get<std::string>();
        entity.canonical_name = record["name"].get<std::string>();
        entity.subtype = subtype_from_name(record["subtype"].get<std::string>());
        if (record.contains("surface_forms")) {
            if (!record["surface_forms"].is_array())
                throw DataError("kb.json: entity \"" + entity.entity_id +
                                "\": surface_forms is not an array");
            for (const auto& surface : record["surface_forms"]) {
                if (!surface.is_string())
                    throw DataError("kb.json: entity \"" + entity.entity_id +
                                    "\": surface form is not a string");
                entity.surface_forms.push_back(surface.get<std::string>());
            }
        }
        entities.push_back(std::move(entity));
    }
    return KnowledgeBase::make(std::move(entities));
}

SynonymTable parse_synonyms_json(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw DataError(std::string("synonyms.json: malformed JSON: ") + err.what());
    }
    if (!doc.is_object())
        throw DataError("synonyms.json: expected an object keyed by entity_id");
    SynonymTable table;
    for (const auto& [entity_id, aliases] : doc.items()) {
        if (!aliases.is_array())
            throw DataError("synonyms.json: value for \"" + entity_id + "\" is not an array");
        auto& list = table[entity_id];
        for (const auto& alias : aliases) {
            if (!alias.is_string())
                throw DataError("synonyms.json: alias for \"" + entity_id + "\" is not a string");
            list.push_back(alias.get<std::string>());
        }
    }
    return table;
}

KnowledgeBase merge_synonyms(const KnowledgeBase& kb, const SynonymTable& synonyms) {
    std::vector<Entity> merged = kb.entities();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < merged.size(); ++i)
        index.emplace(merged[i].entity_id, i);
    for (const auto& [entity_id, aliases] : synonyms) {
        auto it = index.find(entity_id);
        if (it == index.end())
            throw DataError("synonyms reference unknown entity_id \"" + entity_id + "\"");
        auto& forms = merged[it->second].surface_forms;
        // Append raw; construction dedupes on the folded rendering.
        forms.insert(forms.end(), aliases.begin(), aliases.end());
    }
    return KnowledgeBase::make(std::move(merged));
}

std::vector<EntityMention> annotate_text(std::string_view txt, const KnowledgeBase& kb) {
    std::vector<EntityMention> mentions;
    if (kb.max_surface_tokens() == 0)
        return mentions;

    std::vector<std::string> tokens = text::split_tokens(text::fold_case(txt));
    const auto& index = kb.surface_index();

    std::size_t pos = 0;
    while (pos < tokens.size()) {
        std::size_t longest = std::min(kb.max_surface_tokens(), tokens.size() - pos);
        bool matched = false;
        for (std::size_t len = longest; len >= 1; --len) {
            std::string key = tokens[pos];
            for (std::size_t i = 1; i < len; ++i) {
                key += ' ';
                key += tokens[pos + i];
            }
            auto it = index.find(key);
            if (it != index.end()) {
                mentions.push_back({it->second, pos, pos + len, std::move(key)});
                pos += len;
                matched = true;
                break;
            }
        }
        if (!matched)
            ++pos;
    }
    return mentions;
}

CorpusAnnotations annotate_corpus(const corpus::UserCorpus& corpus, const KnowledgeBase& kb) {
    CorpusAnnotations annotations;
    annotations.post_mentions.reserve(corpus.posts.size());
    for (const auto& post : corpus.posts)
        annotations.post_mentions.push_back(annotate_text(post.text, kb));
    annotations.profile_mentions = annotate_text(corpus.cleansed_description, kb);
    return annotations;
}

std::vector<EntityMention> flatten(const CorpusAnnotations& annotations) {
    std::vector<EntityMention> all;
    for (const auto& post : annotations.post_mentions)
        all.insert(all.end(), post.begin(), post.end());
    all.insert(all.end(), annotations.profile_mentions.begin(),
               annotations.profile_mentions.end());
    return all;
}

std::vector<EntityCount> top_entities(const std::vector<EntityMention>& mentions,
                                      const KnowledgeBase& kb,
                                      std::size_t k) {
    if (k < 1)
        throw DataError("top_entities requires k >= 1");
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& mention : mentions)
        ++counts[mention.entity_id];

    std::vector<EntityCount> ranked;
    ranked.reserve(counts.size());
    for (const auto& [entity_id, frequency] : counts) {
        const Entity& entity = kb.entity(entity_id);
        ranked.push_back({entity_id, entity.canonical_name, entity.subtype, frequency});
    }
    std::sort(ranked.begin(), ranked.end(), [](const EntityCount& a, const EntityCount& b) {
        if (a.frequency != b.frequency)
            return a.frequency > b.frequency;
        return a.canonical_name < b.canonical_name;
    });
    if (ranked.size() > k)
        ranked.resize(k);
    return ranked;
}

} // namespace sbd::knowledge
