#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "sbd/text.hpp"

using namespace sbd;

TEST_CASE("utf8 round-trips and replaces invalid bytes") {
    std::string s = "caf\xc3\xa9 \xe2\x82\xac \xf0\x9f\x98\x80"; // café € 😀
    auto cps = text::decode_utf8(s);
    CHECK(text::encode_utf8(cps) == s);

    auto bad = text::decode_utf8("a\xffz");
    REQUIRE(bad.size() == 3);
    CHECK(bad[0] == U'a');
    CHECK(bad[1] == char32_t{0xFFFD});
    CHECK(bad[2] == U'z');

    // Truncated multi-byte sequence at end of input.
    auto truncated = text::decode_utf8("\xc3");
    REQUIRE(truncated.size() == 1);
    CHECK(truncated[0] == char32_t{0xFFFD});
}

TEST_CASE("space classification covers unicode separators") {
    CHECK(text::is_space(U' '));
    CHECK(text::is_space(U'\t'));
    CHECK(text::is_space(U'\n'));
    CHECK(text::is_space(U'\r'));
    CHECK(text::is_space(char32_t{0x00A0})); // NBSP
    CHECK(text::is_space(char32_t{0x2009})); // thin space
    CHECK(text::is_space(char32_t{0x3000})); // ideographic space
    CHECK_FALSE(text::is_space(U'a'));
    CHECK_FALSE(text::is_space(U'0'));
}

TEST_CASE("punctuation classification covers social-text symbols") {
    for (char32_t cp : {U'!', U'.', U',', U'#', U'@', U'"', U'(', U'~'})
        CHECK(text::is_punctuation(cp));
    CHECK(text::is_punctuation(char32_t{0x20AC}));  // €
    CHECK(text::is_punctuation(char32_t{0x2192}));  // →
    CHECK(text::is_punctuation(char32_t{0x2019}));  // right single quote
    CHECK(text::is_punctuation(char32_t{0x1F600})); // emoji
    CHECK_FALSE(text::is_punctuation(U'a'));
    CHECK_FALSE(text::is_punctuation(U'Z'));
    CHECK_FALSE(text::is_punctuation(U'7'));
    CHECK_FALSE(text::is_punctuation(char32_t{0x00E9})); // é
}

TEST_CASE("case folding reaches beyond ascii") {
    CHECK(text::fold_case("HeLLo") == "hello");
    CHECK(text::fold_case("\xc3\x89\xc3\x80") == "\xc3\xa9\xc3\xa0");         // ÉÀ -> éà
    CHECK(text::fold_case("\xce\x91\xce\x92\xce\x93") == "\xce\xb1\xce\xb2\xce\xb3"); // ΑΒΓ
    CHECK(text::fold_case("\xd0\x90\xd0\x91") == "\xd0\xb0\xd0\xb1");         // АБ -> аб
    CHECK(text::fold_case("already lower 123") == "already lower 123");
}

TEST_CASE("html entity decoding") {
    CHECK(text::decode_html_entities("a &amp; b") == "a & b");
    CHECK(text::decode_html_entities("&lt;b&gt;") == "<b>");
    CHECK(text::decode_html_entities("&quot;q&quot; &apos;a&apos;") == "\"q\" 'a'");
    CHECK(text::decode_html_entities("&#65;&#66;") == "AB");
    CHECK(text::decode_html_entities("&#x41;") == "A");
    CHECK(text::decode_html_entities("one&nbsp;two") == "one two");
    // Unknown or malformed entities survive untouched.
    CHECK(text::decode_html_entities("&frob; &amp") == "&frob; &amp");
    CHECK(text::decode_html_entities("100 &#; x") == "100 &#; x");
}

TEST_CASE("token splitting and joining") {
    CHECK(text::split_tokens("  a  b\tc\n") == std::vector<std::string>{"a", "b", "c"});
    CHECK(text::split_tokens("") == std::vector<std::string>{});
    CHECK(text::split_tokens("   ") == std::vector<std::string>{});
    CHECK(text::split_tokens("one") == std::vector<std::string>{"one"});
    // NBSP separates tokens too.
    CHECK(text::split_tokens("a\xc2\xa0m") == std::vector<std::string>{"a", "m"});
    CHECK(text::join_tokens({"a", "b", "c"}) == "a b c");
    CHECK(text::join_tokens({}) == "");
}

TEST_CASE("url prefix detection") {
    CHECK(text::starts_with_url_prefix("http://t.co/xyz"));
    CHECK(text::starts_with_url_prefix("https://example.org"));
    CHECK(text::starts_with_url_prefix("HTTPS://EXAMPLE.ORG"));
    CHECK(text::starts_with_url_prefix("www.example.org"));
    CHECK_FALSE(text::starts_with_url_prefix("ftp://example.org"));
    CHECK_FALSE(text::starts_with_url_prefix("ahttp://x"));
    CHECK_FALSE(text::starts_with_url_prefix("http"));
    CHECK_FALSE(text::starts_with_url_prefix(""));
}
