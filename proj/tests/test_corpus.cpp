#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbd/corpus.hpp"
#include "sbd/error.hpp"
#include "sbd/text.hpp"
#include "sbd/timeutil.hpp"

using namespace sbd;
using corpus::CleansingConfig;
using corpus::RawPost;
using corpus::UserProfile;

namespace {

CleansingConfig config_with(std::initializer_list<std::string> stopwords,
                            bool lowercase = true) {
    CleansingConfig config;
    config.stopwords = {stopwords.begin(), stopwords.end()};
    config.lowercase = lowercase;
    return config;
}

RawPost post(std::string id, std::string author, std::int64_t at, std::string body) {
    RawPost p;
    p.post_id = std::move(id);
    p.author_id = std::move(author);
    p.created_at = at;
    p.text = std::move(body);
    return p;
}

// Assembles noisy social text from a pool of fragments.
std::string random_noisy_text(Rng& rng) {
    static const std::vector<std::string> pool = {
        "Hello", "WORLD", "&amp;", "&lt;tag&gt;", "#Politics!", "@someone",
        "http://t.co/abc", "https://example.org/x?y=1", "www.news.com", "vote",
        "RT", "caf\xc3\xa9", "\xe2\x82\xac""5", "\xf0\x9f\x98\x80", "a,b,c",
        "...", "-", "100%", "Q&amp;A", "\xc2\xa0", "e-mail", "it's",
    };
    std::string out;
    const auto parts = 1 + rng.below(12);
    for (std::uint64_t i = 0; i < parts; ++i) {
        if (i)
            out += rng.bernoulli(0.2) ? "  " : " ";
        out += pool[static_cast<std::size_t>(rng.below(pool.size()))];
    }
    return out;
}

} // namespace

TEST_CASE("cleansing pipeline: entities, urls, punctuation, case, stopwords") {
    auto config = config_with({"rt", "this"});
    CHECK(corpus::cleanse_text("Check &amp; RT this! http://t.co/xyz #Politics", config) ==
          "check politics");
    CHECK(corpus::cleanse_text("", config) == "");
    CHECK(corpus::cleanse_text("   \t\n ", config) == "");
    // URL removal happens on the original tokens, before punctuation breaks
    // them apart.
    CHECK(corpus::cleanse_text("see www.example.org now", config) == "see now");
    // &amp; decodes first, so the lone ampersand is stripped as punctuation.
    CHECK(corpus::cleanse_text("Q&amp;A", config) == "q a");
}

TEST_CASE("cleansing preserves case when configured") {
    auto config = config_with({"rt"}, /*lowercase=*/false);
    CHECK(corpus::cleanse_text("Keep CASE here", config) == "Keep CASE here");
    // The stopword list is matched case-insensitively regardless.
    CHECK(corpus::cleanse_text("RT Keep", config) == "Keep");
}

TEST_CASE("cleansing is idempotent and leaves no noise behind") {
    Rng rng(2024);
    auto config = config_with({"rt", "the", "a"});
    for (int trial = 0; trial < 300; ++trial) {
        std::string raw = random_noisy_text(rng);
        std::string once = corpus::cleanse_text(raw, config);
        CHECK(corpus::cleanse_text(once, config) == once);

        CHECK(once.find("http://") == std::string::npos);
        CHECK(once.find("https://") == std::string::npos);
        CHECK(once.find("www.") == std::string::npos);
        CHECK(once.find("&amp;") == std::string::npos);
        CHECK(once.find("  ") == std::string::npos);
        if (!once.empty()) {
            CHECK(once.front() != ' ');
            CHECK(once.back() != ' ');
        }
        for (char32_t cp : text::decode_utf8(once))
            CHECK_FALSE(text::is_punctuation(cp));
    }
}

TEST_CASE("handle rewriting") {
    corpus::HandleMap handles{{"pm", "Prime Minister"}, {"alp", "Australian Labor Party"}};
    CHECK(corpus::replace_handles("@pm hello", handles) == "Prime Minister hello");
    CHECK(corpus::replace_handles("ask @PM now", handles) == "ask Prime Minister now");
    CHECK(corpus::replace_handles("@unknown_user hi", handles) == "unknown_user hi");
    // Trailing punctuation survives the rewrite.
    CHECK(corpus::replace_handles("thanks @pm!", handles) == "thanks Prime Minister!");
    CHECK(corpus::replace_handles("@alp's plan", handles) == "Australian Labor Party's plan");
    CHECK(corpus::replace_handles("no handles here", handles) == "no handles here");
    // A bare '@' carries no name; cleansing later collapses the gap.
    auto config = config_with({});
    CHECK(corpus::cleanse_text(corpus::replace_handles("a @ b", handles), config) == "a b");
}

TEST_CASE("posts archive parsing") {
    std::string good =
        R"({"post_id":"p1","author_id":"u1","created_at":"2016-08-01T10:00:00Z","text":"hi","is_reply":false,"retweet_count":2,"favorite_count":3})"
        "\n"
        R"({"post_id":"p2","author_id":"u1","created_at":"2016-08-02T10:00:00Z","text":"yo","is_reply":true,"retweet_count":0,"favorite_count":0})"
        "\n";
    std::istringstream in(good);
    auto result = corpus::parse_posts_archive(in);
    REQUIRE(result.posts.size() == 2);
    CHECK(result.skipped == 0);
    CHECK(result.posts[0].post_id == "p1");
    CHECK(result.posts[0].author_id == "u1");
    CHECK(result.posts[0].created_at == timeutil::parse_iso8601_utc("2016-08-01T10:00:00Z"));
    CHECK(result.posts[0].text == "hi");
    CHECK_FALSE(result.posts[0].is_reply);
    CHECK(result.posts[0].retweet_count == 2);
    CHECK(result.posts[0].favorite_count == 3);
    CHECK(result.posts[1].is_reply);

    SUBCASE("fail fast reports the line number") {
        std::istringstream bad("{\"post_id\":\"p1\"}\n");
        CHECK_THROWS_WITH_AS(corpus::parse_posts_archive(bad),
                             doctest::Contains("line 1"), DataError);
    }
    SUBCASE("malformed json fails fast") {
        std::istringstream bad("not json\n");
        CHECK_THROWS_AS(corpus::parse_posts_archive(bad), DataError);
    }
    SUBCASE("bad timestamp fails fast") {
        std::istringstream bad(
            R"({"post_id":"p1","author_id":"u1","created_at":"yesterday","text":"hi","is_reply":false,"retweet_count":0,"favorite_count":0})"
            "\n");
        CHECK_THROWS_AS(corpus::parse_posts_archive(bad), DataError);
    }
    SUBCASE("skip mode counts bad lines and keeps the rest") {
        std::istringstream mixed("garbage\n" + good);
        auto skipped = corpus::parse_posts_archive(mixed, corpus::ParseMode::skip);
        CHECK(skipped.posts.size() == 2);
        CHECK(skipped.skipped == 1);
        REQUIRE(skipped.issues.size() == 1);
        CHECK(skipped.issues[0].find("line 1") != std::string::npos);
    }
    SUBCASE("blank lines are ignored") {
        std::istringstream spaced("\n" + good + "\n");
        CHECK(corpus::parse_posts_archive(spaced).posts.size() == 2);
    }
}

TEST_CASE("users archive parsing") {
    std::string good =
        R"({"user_id":"u1","screen_name":"sam","description":"likes politics","verified":true,"followers_count":10,"friends_count":4})"
        "\n";
    std::istringstream in(good);
    auto result = corpus::parse_users_archive(in);
    REQUIRE(result.users.size() == 1);
    CHECK(result.users[0].user_id == "u1");
    CHECK(result.users[0].screen_name == "sam");
    CHECK(result.users[0].description == "likes politics");
    CHECK(result.users[0].verified);
    CHECK(result.users[0].followers_count == 10);
    CHECK(result.users[0].friends_count == 4);

    std::istringstream bad(R"({"user_id":"u2"})" "\n");
    CHECK_THROWS_AS(corpus::parse_users_archive(bad), DataError);

    std::istringstream mixed(R"({"user_id":"u2"})" "\n" + good);
    auto skipped = corpus::parse_users_archive(mixed, corpus::ParseMode::skip);
    CHECK(skipped.users.size() == 1);
    CHECK(skipped.skipped == 1);
}

TEST_CASE("handles.tsv parsing") {
    std::istringstream in("# politicians\n"
                          "PM\tPrime Minister\n"
                          "\n"
                          "alp\tAustralian Labor Party\n");
    auto handles = corpus::parse_handles_tsv(in);
    REQUIRE(handles.size() == 2);
    CHECK(handles.at("pm") == "Prime Minister");
    CHECK(handles.at("alp") == "Australian Labor Party");

    std::istringstream bad("missing-tab\n");
    CHECK_THROWS_AS(corpus::parse_handles_tsv(bad), DataError);
}

TEST_CASE("stopword list parsing") {
    std::istringstream in("# common\nthe\nand\r\n\nrt\n");
    auto words = corpus::parse_stopwords(in);
    CHECK(words == std::unordered_set<std::string>{"the", "and", "rt"});
}

TEST_CASE("post deduplication keeps first occurrence in order") {
    std::vector<RawPost> posts{post("a", "u", 1, "one"), post("b", "u", 2, "two"),
                               post("a", "u", 3, "three"), post("c", "u", 4, "four"),
                               post("b", "u", 5, "five")};
    auto unique = corpus::dedupe_posts(posts);
    REQUIRE(unique.size() == 3);
    CHECK(unique[0].post_id == "a");
    CHECK(unique[0].text == "one");
    CHECK(unique[1].post_id == "b");
    CHECK(unique[2].post_id == "c");
    // Idempotent.
    auto again = corpus::dedupe_posts(unique);
    CHECK(again.size() == 3);
}

TEST_CASE("corpus building: order, dedupe, orphans, cap, cleansing") {
    UserProfile u1{"u1", "sam", "Loves #Politics &amp; RT", false, 10, 5};
    UserProfile u2{"u2", "kim", "", true, 3, 2};
    std::vector<RawPost> posts{
        post("p1", "u1", 100, "Old @pm news"),
        post("p2", "u1", 300, "New story http://t.co/q"),
        post("p3", "u1", 200, "Middle one"),
        post("p3", "u1", 200, "Middle duplicate"),
        post("px", "ghost", 150, "no profile"),
        post("p4", "u2", 50, "only post"),
        // Tie on created_at: post_id ascending breaks it.
        post("p6", "u1", 300, "tie b"),
        post("p5", "u1", 300, "tie a"),
    };
    corpus::HandleMap handles{{"pm", "Prime Minister"}};
    auto config = config_with({"rt"});

    auto result = corpus::build_corpus({u1, u2}, posts, handles, config);
    CHECK(result.orphaned == 1);
    CHECK(result.duplicates_removed == 1);
    CHECK(result.capped == 0);
    REQUIRE(result.corpora.size() == 2);

    const auto& c1 = result.corpora[0];
    CHECK(c1.profile.user_id == "u1");
    CHECK(c1.cleansed_description == "loves politics");
    REQUIRE(c1.posts.size() == 5);
    // Newest first; within the 300 tie, post_id ascending.
    CHECK(c1.posts[0].post_id == "p2");
    CHECK(c1.posts[1].post_id == "p5");
    CHECK(c1.posts[2].post_id == "p6");
    CHECK(c1.posts[3].post_id == "p3");
    CHECK(c1.posts[4].post_id == "p1");
    // Handles replaced before cleansing; URLs stripped.
    CHECK(c1.posts[4].text == "old prime minister news");
    CHECK(c1.posts[0].text == "new story");

    const auto& c2 = result.corpora[1];
    CHECK(c2.profile.user_id == "u2");
    CHECK(c2.cleansed_description == "");
    REQUIRE(c2.posts.size() == 1);

    SUBCASE("per-user cap keeps the newest posts") {
        auto capped_config = config;
        capped_config.post_cap = 2;
        auto capped = corpus::build_corpus({u1, u2}, posts, handles, capped_config);
        CHECK(capped.capped == 3);
        REQUIRE(capped.corpora[0].posts.size() == 2);
        CHECK(capped.corpora[0].posts[0].post_id == "p2");
        CHECK(capped.corpora[0].posts[1].post_id == "p5");
        CHECK(capped.corpora[1].posts.size() == 1);
    }

    SUBCASE("determinism: same inputs give identical corpora") {
        auto again = corpus::build_corpus({u1, u2}, posts, handles, config);
        REQUIRE(again.corpora.size() == result.corpora.size());
        for (std::size_t i = 0; i < again.corpora.size(); ++i) {
            CHECK(again.corpora[i].cleansed_description ==
                  result.corpora[i].cleansed_description);
            REQUIRE(again.corpora[i].posts.size() == result.corpora[i].posts.size());
            for (std::size_t j = 0; j < again.corpora[i].posts.size(); ++j) {
                CHECK(again.corpora[i].posts[j].post_id == result.corpora[i].posts[j].post_id);
                CHECK(again.corpora[i].posts[j].text == result.corpora[i].posts[j].text);
            }
        }
    }
}

TEST_CASE("corpus jsonl round-trip") {
    UserProfile u1{"u1", "sam", "desc", true, 7, 8};
    std::vector<RawPost> posts{post("p1", "u1", 123, "quoted \"text\" with , comma"),
                               post("p2", "u1", 456, "caf\xc3\xa9")};
    auto built = corpus::build_corpus({u1}, posts, {}, config_with({}));

    std::ostringstream out;
    corpus::write_corpus_jsonl(out, built.corpora);
    std::istringstream in(out.str());
    auto loaded = corpus::read_corpus_jsonl(in);

    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].profile.user_id == "u1");
    CHECK(loaded[0].profile.screen_name == "sam");
    CHECK(loaded[0].profile.verified);
    CHECK(loaded[0].profile.followers_count == 7);
    CHECK(loaded[0].profile.friends_count == 8);
    CHECK(loaded[0].cleansed_description == built.corpora[0].cleansed_description);
    REQUIRE(loaded[0].posts.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(loaded[0].posts[i].post_id == built.corpora[0].posts[i].post_id);
        CHECK(loaded[0].posts[i].created_at == built.corpora[0].posts[i].created_at);
        CHECK(loaded[0].posts[i].text == built.corpora[0].posts[i].text);
        CHECK(loaded[0].posts[i].is_reply == built.corpora[0].posts[i].is_reply);
        CHECK(loaded[0].posts[i].retweet_count == built.corpora[0].posts[i].retweet_count);
        CHECK(loaded[0].posts[i].favorite_count == built.corpora[0].posts[i].favorite_count);
    }

    std::istringstream bad("{\"profile\": 3}\n");
    CHECK_THROWS_AS(corpus::read_corpus_jsonl(bad), DataError);
}

TEST_CASE("timestamp parsing accepted forms") {
    CHECK(timeutil::parse_iso8601_utc("2016-08-15T12:34:56Z") ==
          timeutil::to_unix_seconds(2016, 8, 15, 12, 34, 56));
    CHECK(timeutil::parse_iso8601_utc("2016-08-15T12:34:56+00:00") ==
          timeutil::to_unix_seconds(2016, 8, 15, 12, 34, 56));
    CHECK(timeutil::parse_iso8601_utc("2016-08-15") ==
          timeutil::to_unix_seconds(2016, 8, 15));
    CHECK(timeutil::format_iso8601_utc(timeutil::to_unix_seconds(2016, 8, 15, 12, 0, 0)) ==
          "2016-08-15T12:00:00Z");
    // Round-trip across a leap day and the epoch.
    CHECK(timeutil::format_iso8601_utc(timeutil::parse_iso8601_utc("2016-02-29T00:00:00Z")) ==
          "2016-02-29T00:00:00Z");
    CHECK(timeutil::parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
    CHECK_THROWS_AS(timeutil::parse_iso8601_utc("15/08/2016"), DataError);
    CHECK_THROWS_AS(timeutil::parse_iso8601_utc("2016-13-01T00:00:00Z"), DataError);
}
