#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sbd::corpus {

struct RawPost {
    std::string post_id;
    std::string author_id;
    std::int64_t created_at = 0; // UNIX seconds, UTC
    std::string text;
    bool is_reply = false;
    std::int64_t retweet_count = 0;
    std::int64_t favorite_count = 0;
};

struct UserProfile {
    std::string user_id;
    std::string screen_name;
    std::string description;
    bool verified = false;
    std::int64_t followers_count = 0;
    std::int64_t friends_count = 0;
};

struct CleansingConfig {
    std::unordered_set<std::string> stopwords; // lowercase tokens
    bool lowercase = true;
    std::size_t post_cap = 3200;
};

// Posts are held newest first, text already cleansed.
struct UserCorpus {
    UserProfile profile;
    std::vector<RawPost> posts;
    std::string cleansed_description;
};

enum class ParseMode { fail_fast, skip };

struct PostParseResult {
    std::vector<RawPost> posts;
    std::size_t skipped = 0;
    std::vector<std::string> issues; // one message per skipped line
};

struct UserParseResult {
    std::vector<UserProfile> users;
    std::size_t skipped = 0;
    std::vector<std::string> issues;
};

// JSON Lines readers. In fail_fast mode the first malformed record throws
// DataError with its line number; in skip mode bad records are counted.
PostParseResult parse_posts_archive(std::istream& in, ParseMode mode = ParseMode::fail_fast);
UserParseResult parse_users_archive(std::istream& in, ParseMode mode = ParseMode::fail_fast);

using HandleMap = std::unordered_map<std::string, std::string>; // lowercase handle -> display name

// handles.tsv: "handle<TAB>display name" per line, '#' comments allowed.
HandleMap parse_handles_tsv(std::istream& in);

// stopwords.txt: one token per line, '#' comments allowed.
std::unordered_set<std::string> parse_stopwords(std::istream& in);

// Keeps the first occurrence of each post_id, preserving order.
std::vector<RawPost> dedupe_posts(const std::vector<RawPost>& posts);

// Rewrites '@handle' tokens: mapped handles become the display name,
// unmapped ones keep the bare name without '@'. Trailing non-handle
// characters of the token survive the rewrite.
std::string replace_handles(std::string_view text, const HandleMap& handles);

// Applies, in order: HTML-entity decoding, URL-token removal, punctuation
// to space, optional lowercasing, stopword removal, whitespace collapse.
std::string cleanse_text(std::string_view text, const CleansingConfig& config);

struct CorpusBuildResult {
    std::vector<UserCorpus> corpora; // profile order preserved
    std::size_t orphaned = 0;        // posts whose author has no profile
    std::size_t duplicates_removed = 0;
    std::size_t capped = 0;          // posts dropped by the per-user cap
};

CorpusBuildResult build_corpus(const std::vector<UserProfile>& profiles,
                               const std::vector<RawPost>& posts,
                               const HandleMap& handles,
                               const CleansingConfig& config);

// corpus.jsonl persistence: one UserCorpus object per line.
void write_corpus_jsonl(std::ostream& out, const std::vector<UserCorpus>& corpora);
std::vector<UserCorpus> read_corpus_jsonl(std::istream& in);

} // namespace sbd::corpus
