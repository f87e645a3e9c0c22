#include "sbd/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "sbd/error.hpp"
#include "sbd/text.hpp"
#include "sbd/timeutil.hpp"

namespace sbd::corpus {

using nlohmann::json;

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const json& require_field(const json& record, const char* key, std::size_t line) {
    auto it = record.find(key);
    if (it == record.end())
        throw DataError("line " + std::to_string(line) + ": missing field \"" + key + "\"");
    return *it;
}

std::string get_string(const json& record, const char* key, std::size_t line) {
    const json& v = require_field(record, key, line);
    if (!v.is_string())
        throw DataError("line " + std::to_string(line) + ": field \"" + key + "\" is not a string");
    return v.get<std::string>();
}

bool get_bool(const json& record, const char* key, std::size_t line) {
    const json& v = require_field(record, key, line);
    if (!v.is_boolean())
        throw DataError("line " + std::to_string(line) + ": field \"" + key + "\" is not a boolean");
    return v.get<bool>();
}

std::int64_t get_count(const json& record, const char* key, std::size_t line) {
    const json& v = require_field(record, key, line);
    if (!v.is_number_integer())
        throw DataError("line " + std::to_string(line) + ": field \"" + key + "\" is not an integer");
    auto n = v.get<std::int64_t>();
    if (n < 0)
        throw DataError("line " + std::to_string(line) + ": field \"" + key + "\" is negative");
    return n;
}

RawPost parse_post_record(const json& record, std::size_t line) {
    RawPost post;
    post.post_id = get_string(record, "post_id", line);
    if (post.post_id.empty())
        throw DataError("line " + std::to_string(line) + ": empty post_id");
    post.author_id = get_string(record, "author_id", line);
    post.created_at = timeutil::parse_iso8601_utc(get_string(record, "created_at", line));
    if (post.created_at <= 0)
        throw DataError("line " + std::to_string(line) + ": created_at must be after the epoch");
    post.text = get_string(record, "text", line);
    post.is_reply = get_bool(record, "is_reply", line);
    post.retweet_count = get_count(record, "retweet_count", line);
    post.favorite_count = get_count(record, "favorite_count", line);
    return post;
}

UserProfile parse_user_record(const json& record, std::size_t line) {
    UserProfile user;
    user.user_id = get_string(record, "user_id", line);
    if (user.user_id.empty())
        throw DataError("line " + std::to_string(line) + ": empty user_id");
    user.screen_name = get_string(record, "screen_name", line);
    user.description = get_string(record, "description", line);
    user.verified = get_bool(record, "verified", line);
    user.followers_count = get_count(record, "followers_count", line);
    user.friends_count = get_count(record, "friends_count", line);
    return user;
}

} // namespace

PostParseResult parse_posts_archive(std::istream& in, ParseMode mode) {
    PostParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            json record = json::parse(line, nullptr, true);
            if (!record.is_object())
                throw DataError("line " + std::to_string(line_no) + ": not a JSON object");
            result.posts.push_back(parse_post_record(record, line_no));
        } catch (const json::parse_error&) {
            DataError err("line " + std::to_string(line_no) + ": malformed JSON");
            if (mode == ParseMode::fail_fast)
                throw err;
            ++result.skipped;
            result.issues.push_back(err.what());
        } catch (const DataError& err) {
            if (mode == ParseMode::fail_fast)
                throw;
            ++result.skipped;
            result.issues.push_back(err.what());
        }
    }
    return result;
}

UserParseResult parse_users_archive(std::istream& in, ParseMode mode) {
    UserParseResult result;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            json record = json::parse(line, nullptr, true);
            if (!record.is_object())
                throw DataError("line " + std::to_string(line_no) + ": not a JSON object");
            UserProfile user = parse_user_record(record, line_no);
            if (!seen.insert(user.user_id).second)
                throw DataError("line " + std::to_string(line_no) + ": duplicate user_id \"" +
                                user.user_id + "\"");
            result.users.push_back(std::move(user));
        } catch (const json::parse_error&) {
            DataError err("line " + std::to_string(line_no) + ": malformed JSON");
            if (mode == ParseMode::fail_fast)
                throw err;
            ++result.skipped;
            result.issues.push_back(err.what());
        } catch (const DataError& err) {
            if (mode == ParseMode::fail_fast)
                throw;
            ++result.skipped;
            result.issues.push_back(err.what());
        }
    }
    return result;
}

HandleMap parse_handles_tsv(std::istream& in) {
    HandleMap handles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw DataError("handles.tsv line " + std::to_string(line_no) +
                            ": expected \"handle<TAB>name\"");
        handles[ascii_lower(line.substr(0, tab))] = line.substr(tab + 1);
    }
    return handles;
}

std::unordered_set<std::string> parse_stopwords(std::istream& in) {
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        for (auto& token : text::split_tokens(line))
            words.insert(token);
    }
    return words;
}

std::vector<RawPost> dedupe_posts(const std::vector<RawPost>& posts) {
    std::vector<RawPost> unique;
    unique.reserve(posts.size());
    std::unordered_set<std::string> seen;
    for (const auto& post : posts) {
        if (seen.insert(post.post_id).second)
            unique.push_back(post);
    }
    return unique;
}

namespace {

bool is_handle_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

} // namespace

std::string replace_handles(std::string_view txt, const HandleMap& handles) {
    std::vector<std::string> tokens = text::split_tokens(txt);
    for (auto& token : tokens) {
        if (token.empty() || token[0] != '@')
            continue;
        std::size_t end = 1;
        while (end < token.size() && is_handle_char(token[end]))
            ++end;
        std::string handle = token.substr(1, end - 1);
        std::string rest = token.substr(end);
        auto it = handles.find(ascii_lower(handle));
        token = (it != handles.end() ? it->second : handle) + rest;
    }
    return text::join_tokens(tokens);
}

std::string cleanse_text(std::string_view txt, const CleansingConfig& config) {
    std::string decoded = text::decode_html_entities(txt);

    std::vector<std::string> tokens = text::split_tokens(decoded);
    std::u32string stripped;
    for (const auto& token : tokens) {
        if (text::starts_with_url_prefix(token))
            continue;
        for (char32_t cp : text::decode_utf8(token))
            stripped.push_back(text::is_punctuation(cp) ? U' ' : cp);
        stripped.push_back(U' ');
    }

    if (config.lowercase)
        for (auto& cp : stripped)
            cp = text::fold_char(cp);

    std::vector<std::string> kept;
    std::u32string current;
    auto flush = [&] {
        if (current.empty())
            return;
        std::string token = text::encode_utf8(current);
        current.clear();
        // Stopword comparison is case-folded regardless of the lowercase
        // setting; the list itself is lowercase by contract.
        if (config.stopwords.count(config.lowercase ? token : text::fold_case(token)))
            return;
        kept.push_back(std::move(token));
    };
    for (char32_t cp : stripped) {
        if (text::is_space(cp))
            flush();
        else
            current.push_back(cp);
    }
    flush();
    return text::join_tokens(kept);
}

CorpusBuildResult build_corpus(const std::vector<UserProfile>& profiles,
                               const std::vector<RawPost>& posts,
                               const HandleMap& handles,
                               const CleansingConfig& config) {
    CorpusBuildResult result;
    std::unordered_map<std::string, std::size_t> index;
    result.corpora.reserve(profiles.size());
    for (const auto& profile : profiles) {
        UserCorpus corpus;
        corpus.profile = profile;
        corpus.cleansed_description =
            cleanse_text(replace_handles(profile.description, handles), config);
        index.emplace(profile.user_id, result.corpora.size());
        result.corpora.push_back(std::move(corpus));
    }

    std::vector<RawPost> unique = dedupe_posts(posts);
    result.duplicates_removed = posts.size() - unique.size();

    for (auto& post : unique) {
        auto it = index.find(post.author_id);
        if (it == index.end()) {
            ++result.orphaned;
            continue;
        }
        post.text = cleanse_text(replace_handles(post.text, handles), config);
        result.corpora[it->second].posts.push_back(std::move(post));
    }

    for (auto& corpus : result.corpora) {
        std::stable_sort(corpus.posts.begin(), corpus.posts.end(),
                         [](const RawPost& a, const RawPost& b) {
                             if (a.created_at != b.created_at)
                                 return a.created_at > b.created_at;
                             return a.post_id < b.post_id;
                         });
        if (corpus.posts.size() > config.post_cap) {
            result.capped += corpus.posts.size() - config.post_cap;
            corpus.posts.resize(config.post_cap);
        }
    }
    return result;
}

namespace {

json post_to_json(const RawPost& post) {
    return json{{"post_id", post.post_id},
                {"author_id", post.author_id},
                {"created_at", timeutil::format_iso8601_utc(post.created_at)},
                {"text", post.text},
                {"is_reply", post.is_reply},
                {"retweet_count", post.retweet_count},
                {"favorite_count", post.favorite_count}};
}

} // namespace

void write_corpus_jsonl(std::ostream& out, const std::vector<UserCorpus>& corpora) {
    for (const auto& corpus : corpora) {
        json posts = json::array();
        for (const auto& post : corpus.posts)
            posts.push_back(post_to_json(post));
        json record{{"profile",
                     {{"user_id", corpus.profile.user_id},
                      {"screen_name", corpus.profile.screen_name},
                      {"description", corpus.profile.description},
                      {"verified", corpus.profile.verified},
                      {"followers_count", corpus.profile.followers_count},
                      {"friends_count", corpus.profile.friends_count}}},
                    {"cleansed_description", corpus.cleansed_description},
                    {"posts", std::move(posts)}};
        out << record.dump() << '\n';
    }
}

std::vector<UserCorpus> read_corpus_jsonl(std::istream& in) {
    std::vector<UserCorpus> corpora;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error&) {
            throw DataError("corpus.jsonl line " + std::to_string(line_no) + ": malformed JSON");
        }
        UserCorpus corpus;
        const json& profile = require_field(record, "profile", line_no);
        corpus.profile = parse_user_record(profile, line_no);
        corpus.cleansed_description = get_string(record, "cleansed_description", line_no);
        for (const auto& post : require_field(record, "posts", line_no))
            corpus.posts.push_back(parse_post_record(post, line_no));
        corpora.push_back(std::move(corpus));
    }
    return corpora;
}

} // namespace sbd::corpus
