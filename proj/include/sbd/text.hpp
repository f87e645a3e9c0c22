#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbd::text {

// UTF-8 decode; each invalid byte becomes U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(const std::u32string& cps);

// Whitespace: ASCII space/tab/newline family plus the Unicode space
// separators (NBSP, U+2000..200A, line/para separators, NNBSP, MMSP,
// ideographic space).
bool is_space(char32_t cp);

// Punctuation and symbol codepoints (categories P* and S*) over the ranges
// common in social text: full ASCII and Latin-1 sets, general punctuation,
// currency, arrows/math/misc symbols, dingbats, CJK punctuation, fullwidth
// forms, and emoji blocks. Codepoints outside the table are treated as
// letters and left alone.
bool is_punctuation(char32_t cp);

// Simple case folding over ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic; identity elsewhere.
char32_t fold_char(char32_t cp);
std::string fold_case(std::string_view s);

// Decodes the named entities &amp; &lt; &gt; &quot; &apos; &nbsp; and
// numeric &#NNN; / &#xHH; forms. Unknown entities are left untouched.
std::string decode_html_entities(std::string_view s);

// Splits on is_space runs; tokens keep their original bytes.
std::vector<std::string> split_tokens(std::string_view s);

std::string join_tokens(const std::vector<std::string>& tokens);

bool starts_with_url_prefix(std::string_view token);

} // namespace sbd::text
