#include "sbd/synth.hpp"

#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sbd/corpus.hpp"
#include "sbd/error.hpp"
#include "sbd/rng.hpp"
#include "sbd/text.hpp"
#include "sbd/timeutil.hpp"

namespace sbd::synth {

namespace {

using knowledge::Entity;
using knowledge::Subtype;
using nlohmann::json;

struct EntitySpec {
    const char* id;
    const char* name;
    Subtype subtype;
    std::vector<const char*> forms;
};

const std::vector<EntitySpec>& entity_specs() {
    static const std::vector<EntitySpec> specs = {
        {"e_abbott", "Tony Abbott", Subtype::politician, {"abbott"}},
        {"e_turnbull", "Malcolm Turnbull", Subtype::politician, {"turnbull"}},
        {"e_shorten", "Bill Shorten", Subtype::politician, {"shorten"}},
        {"e_gillard", "Julia Gillard", Subtype::politician, {"gillard"}},
        {"e_rudd", "Kevin Rudd", Subtype::politician, {"rudd"}},
        {"e_bishop", "Julie Bishop", Subtype::politician, {}},
        {"e_plibersek", "Tanya Plibersek", Subtype::politician, {"plibersek"}},
        {"e_hanson", "Pauline Hanson", Subtype::politician, {"hanson"}},
        {"e_albanese", "Anthony Albanese", Subtype::politician, {"albanese", "albo"}},
        {"e_menzies", "Robert Menzies", Subtype::politician, {"menzies"}},
        {"e_alp", "Australian Labor Party", Subtype::political_party,
         {"labor party", "labor"}},
        {"e_lpa", "Liberal Party", Subtype::political_party, {"liberals"}},
        {"e_greens", "Australian Greens", Subtype::political_party, {"greens"}},
        {"e_nationals", "National Party", Subtype::political_party, {"nationals"}},
        {"e_onenation", "One Nation", Subtype::political_party, {}},
        {"e_coalition", "Coalition", Subtype::political_party, {}},
        {"e_parliament", "Parliament", Subtype::organization, {"parliament house"}},
        {"e_senate", "Senate", Subtype::organization, {}},
        {"e_house", "House of Representatives", Subtype::organization, {"lower house"}},
        {"e_aec", "Electoral Commission", Subtype::organization, {"aec"}},
        {"e_treasury", "Treasury", Subtype::organization, {}},
        {"e_highcourt", "High Court", Subtype::organization, {}},
        {"e_cabinet", "Cabinet", Subtype::organization, {}},
        {"e_election", "Elections", Subtype::event,
         {"election", "general election", "federal election"}},
        {"e_referendum", "Referendum", Subtype::event, {}},
        {"e_budget", "Budget", Subtype::event, {"federal budget"}},
        {"e_questiontime", "Question Time", Subtype::event, {}},
        {"e_campaign", "Campaign Trail", Subtype::event, {"campaign"}},
        {"e_debate", "Leaders Debate", Subtype::event, {"debate"}},
        {"e_poll", "Opinion Poll", Subtype::event,
         {"poll", "polls", "public opinion poll"}},
        {"e_jobsgrowth", "Jobs and Growth", Subtype::political_slogan, {"jobs growth"}},
        {"e_stoptheboats", "Stop the Boats", Subtype::political_slogan, {"stop boats"}},
        {"e_movingforward", "Moving Forward", Subtype::political_slogan, {}},
        {"e_fairgo", "Fair Go", Subtype::political_slogan, {}},
        {"e_voter", "Voter", Subtype::voter, {"voters", "swing voter"}},
        {"e_constituent", "Constituent", Subtype::voter, {"constituents"}},
        {"e_journalist", "Political Journalist", Subtype::person, {"press gallery"}},
        {"e_staffer", "Ministerial Staffer", Subtype::person, {"staffer"}},
        {"e_pm", "Prime Minister", Subtype::person, {"pm"}},
        {"e_mp", "Member of Parliament", Subtype::person, {"mp"}},
        {"e_politics", "Politics", Subtype::ontology, {"political", "politically"}},
        {"e_policy", "Policy", Subtype::ontology, {"policies"}},
        {"e_democracy", "Democracy", Subtype::ontology, {"democratic"}},
        {"e_government", "Government", Subtype::ontology, {"govt"}},
        {"e_opposition", "Opposition", Subtype::ontology, {}},
        {"e_vote", "Vote", Subtype::ontology, {"votes", "voting", "ballot"}},
    };
    return specs;
}

// Words off-topic users draw from; every token here is disjoint from every
// gazetteer surface-form token.
const std::vector<const char*>& neutral_vocabulary() {
    static const std::vector<const char*> words = {
        "recipe",     "pasta",      "garden",     "sunshine",  "coffee",
        "breakfast",  "cycling",    "marathon",   "playlist",  "guitar",
        "concert",    "beach",      "holiday",    "camping",   "sunset",
        "photo",      "puppy",      "kitten",     "football",  "cricket",
        "tennis",     "swimming",   "yoga",       "pilates",   "brunch",
        "chocolate",  "vanilla",    "cinnamon",   "basil",     "tomato",
        "avocado",    "sourdough",  "espresso",   "latte",     "smoothie",
        "hiking",     "kayak",      "surfing",    "snowboard", "painting",
        "sketch",     "museum",     "novel",      "poetry",    "bookclub",
        "garage",     "vinyl",      "drums",      "piano",     "violin",
        "orchestra",  "cinema",     "popcorn",    "sequel",    "gardening",
        "roses",      "tulips",     "orchid",     "compost",   "harvest",
        "farmers",    "picnic",     "barbecue",   "weekend",   "roadtrip",
        "campfire",   "fishing",    "sailing",    "harbour",   "lighthouse",
        "seagull",    "dolphin",    "whale",      "reef",      "snorkel",
        "island",     "volcano",    "glacier",    "aurora",    "telescope",
        "stargazing", "meteor",     "comet",      "galaxy",    "nebula",
        "puzzle",     "chess",      "scrabble",   "trivia",    "karaoke",
        "ballet",     "salsa",      "tango",      "jazz",      "blues",
        "indie",      "remix",      "podcast",    "audiobook", "sketchbook",
        "watercolor", "ceramics",   "pottery",    "knitting",  "crochet",
        "quilt",      "origami",    "bonsai",     "aquarium",  "terrarium",
        "hamster",    "parrot",     "budgie",     "goldfish",  "jigsaw",
    };
    return words;
}

struct HandleSpec {
    const char* handle;  // lowercase, no '@'
    const char* display; // replacement text
};

const std::vector<HandleSpec>& political_handles() {
    static const std::vector<HandleSpec> handles = {
        {"tonyabbottmhr", "Tony Abbott"},
        {"turnbullmalcolm", "Malcolm Turnbull"},
        {"billshortenmp", "Bill Shorten"},
        {"juliagillard", "Julia Gillard"},
        {"mrkrudd", "Kevin Rudd"},
        {"paulinehansonoz", "Pauline Hanson"},
        {"albomp", "Anthony Albanese"},
        {"greensau", "Australian Greens"},
        {"australianlabor", "Australian Labor Party"},
        {"liberalaus", "Liberal Party"},
    };
    return handles;
}

const std::vector<HandleSpec>& neutral_handles() {
    static const std::vector<HandleSpec> handles = {
        {"bakingfan", "Baking Fan"},
        {"sourdoughsam", "Sourdough Sam"},
        {"trailrunnerkate", "Trail Runner Kate"},
        {"vinylcollector", "Vinyl Collector"},
    };
    return handles;
}

// Surfaces the generator may emit: cleansing must give back exactly the
// case-folded surface, otherwise the annotator could never re-find it.
std::vector<std::string> usable_surfaces(const knowledge::KnowledgeBase& kb,
                                         const corpus::CleansingConfig& cleansing) {
    std::vector<std::string> surfaces;
    for (const auto& entity : kb.entities())
        for (const auto& surface : entity.surface_forms) {
            std::string folded;
            for (const auto& token : text::split_tokens(surface)) {
                if (!folded.empty())
                    folded += ' ';
                folded += text::fold_case(token);
            }
            if (!folded.empty() && corpus::cleanse_text(surface, cleansing) == folded)
                surfaces.push_back(surface);
        }
    return surfaces;
}

std::string pad4(std::size_t n) {
    std::string digits = std::to_string(n);
    return std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

} // namespace

std::vector<Entity> bundled_entities() {
    std::vector<Entity> entities;
    for (const auto& spec : entity_specs()) {
        Entity e;
        e.entity_id = spec.id;
        e.canonical_name = spec.name;
        e.subtype = spec.subtype;
        for (const char* form : spec.forms)
            e.surface_forms.emplace_back(form);
        entities.push_back(std::move(e));
    }
    return entities;
}

knowledge::SynonymTable bundled_synonyms() {
    return {
        {"e_election", {"snap election", "byelection"}},
        {"e_poll", {"newspoll"}},
        {"e_government", {"federal government"}},
        {"e_greens", {"green party"}},
    };
}

std::vector<std::string> bundled_stopwords() {
    return {"a",    "an",   "and",  "are", "as",   "at",   "be",   "by",   "for",
            "from", "has",  "have", "he",  "her",  "his",  "i",    "in",   "is",
            "it",   "its",  "me",   "my",  "of",   "on",   "or",   "our",  "rt",
            "s",    "t",    "that", "the", "their", "them", "they", "this", "to",
            "was",  "we",   "were", "will", "with", "you",  "your"};
}

SynthOutput generate(const SynthConfig& config) {
    if (config.n_on < 1 || config.n_off < 1)
        throw DataError("synthetic corpus needs at least one user per class");
    if (config.on_topic_fraction < 0.0 || config.on_topic_fraction > 1.0)
        throw DataError("on-topic fraction must lie in [0, 1]");

    corpus::CleansingConfig cleansing;
    for (const auto& word : bundled_stopwords())
        cleansing.stopwords.insert(word);

    const auto kb = knowledge::merge_synonyms(
        knowledge::KnowledgeBase::make(bundled_entities()), bundled_synonyms());
    const std::vector<std::string> on_surfaces = usable_surfaces(kb, cleansing);
    if (on_surfaces.empty())
        throw DataError("bundled gazetteer yields no usable surface forms");

    // The few single-token surfaces off-topic users may hit by accident.
    std::vector<std::string> accidental;
    for (const char* s : {"budget", "poll", "election", "politics", "vote", "debate"})
        accidental.emplace_back(s);

    const auto& neutral = neutral_vocabulary();

    // Post timestamps: one window per feature bucket, round-robin per user,
    // so every user has activity in every bucket.
    const std::int64_t reference = timeutil::to_unix_seconds(2016, 8, 15, 12, 0, 0);
    const std::int64_t starts[] = {
        reference - 548 * 86400,                  // before any window
        timeutil::to_unix_seconds(2015, 10, 1),   // three quarters back
        timeutil::to_unix_seconds(2016, 1, 1),    // two quarters back
        timeutil::to_unix_seconds(2016, 4, 1),    // one quarter back
        timeutil::to_unix_seconds(2016, 7, 1),    // the reference quarter
    };
    const std::int64_t ends[] = {starts[1] - 1, starts[2] - 1, starts[3] - 1,
                                 starts[4] - 1, reference};

    Rng rng(config.seed);
    std::ostringstream posts;
    std::ostringstream users;
    std::ostringstream labels;
    labels << "user_id,label\n";

    const std::size_t total = config.n_on + config.n_off;
    for (std::size_t u = 0; u < total; ++u) {
        const bool on_topic = u < config.n_on;
        const std::string user_id =
            (on_topic ? "on_" : "off_") + pad4(on_topic ? u + 1 : u - config.n_on + 1);

        std::string description;
        if (on_topic) {
            description = "Writing about " + on_surfaces[rng.below(on_surfaces.size())] +
                          " and " + on_surfaces[rng.below(on_surfaces.size())] +
                          " every day";
        } else {
            description = std::string("Mostly ") + neutral[rng.below(neutral.size())] +
                          " and " + neutral[rng.below(neutral.size())] + " here";
        }

        json profile;
        profile["user_id"] = user_id;
        profile["screen_name"] = user_id;
        profile["description"] = description;
        profile["verified"] = rng.bernoulli(on_topic ? 0.3 : 0.05);
        profile["followers_count"] =
            on_topic ? rng.uniform_int(200, 5000) : rng.uniform_int(10, 500);
        profile["friends_count"] =
            on_topic ? rng.uniform_int(100, 2000) : rng.uniform_int(50, 1000);
        users << profile.dump() << '\n';
        labels << user_id << ',' << (on_topic ? "on_topic" : "off_topic") << '\n';

        const std::size_t n_posts = static_cast<std::size_t>(rng.uniform_int(30, 60));
        for (std::size_t p = 0; p < n_posts; ++p) {
            const std::size_t bucket = p % 5;
            const std::int64_t created =
                rng.uniform_int(starts[bucket], ends[bucket]);

            std::string body;
            const auto n_tokens = static_cast<std::size_t>(rng.uniform_int(8, 18));
            for (std::size_t w = 0; w < n_tokens; ++w) {
                if (!body.empty())
                    body += ' ';
                const double domain_p = on_topic ? config.on_topic_fraction : 0.005;
                if (rng.bernoulli(domain_p))
                    body += on_topic ? on_surfaces[rng.below(on_surfaces.size())]
                                     : accidental[rng.below(accidental.size())];
                else
                    body += neutral[rng.below(neutral.size())];
            }
            if (rng.bernoulli(on_topic ? 0.08 : 0.05)) {
                const auto& pool = on_topic ? political_handles() : neutral_handles();
                body += " @";
                body += pool[rng.below(pool.size())].handle;
            }
            if (rng.bernoulli(0.12))
                body += " https://t.co/x" + std::to_string(rng.below(100000));
            if (rng.bernoulli(0.08))
                body += " &amp; more";

            json post;
            post["post_id"] = "p_" + user_id + "_" + std::to_string(p + 1);
            post["author_id"] = user_id;
            post["created_at"] = timeutil::format_iso8601_utc(created);
            post["text"] = body;
            post["is_reply"] = rng.bernoulli(on_topic ? 0.2 : 0.3);
            post["retweet_count"] =
                on_topic ? rng.uniform_int(0, 50) : rng.uniform_int(0, 5);
            post["favorite_count"] =
                on_topic ? rng.uniform_int(0, 100) : rng.uniform_int(0, 10);
            posts << post.dump() << '\n';
        }
    }

    SynthOutput out;
    out.posts_jsonl = posts.str();
    out.users_jsonl = users.str();
    out.labels_csv = labels.str();

    std::ostringstream handles;
    for (const auto& h : political_handles())
        handles << h.handle << '\t' << h.display << '\n';
    for (const auto& h : neutral_handles())
        handles << h.handle << '\t' << h.display << '\n';
    out.handles_tsv = handles.str();

    json kb_doc;
    kb_doc["entities"] = json::array();
    for (const auto& spec : entity_specs()) {
        json entity;
        entity["id"] = spec.id;
        entity["name"] = spec.name;
        entity["subtype"] = std::string(knowledge::subtype_name(spec.subtype));
        entity["surface_forms"] = json::array();
        for (const char* form : spec.forms)
            entity["surface_forms"].push_back(form);
        kb_doc["entities"].push_back(std::move(entity));
    }
    out.kb_json = kb_doc.dump(2) + "\n";

    json synonyms_doc;
    for (const auto& [entity_id, aliases] : bundled_synonyms())
        synonyms_doc[entity_id] = aliases;
    out.synonyms_json = synonyms_doc.dump(2) + "\n";

    std::string stopwords;
    for (const auto& word : bundled_stopwords()) {
        stopwords += word;
        stopwords += '\n';
    }
    out.stopwords_txt = stopwords;
    return out;
}

} // namespace sbd::synth
