#include "sbd/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace sbd::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

} // namespace

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len = 0;
        char32_t cp = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        char32_t decoded = cp;
        for (int k = 1; k < len; ++k) {
            unsigned char b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            decoded = (decoded << 6) | (b & 0x3F);
        }
        // Reject overlong encodings, surrogates, and out-of-range values.
        if (ok) {
            if ((len == 2 && decoded < 0x80) || (len == 3 && decoded < 0x800) ||
                (len == 4 && decoded < 0x10000) || decoded > 0x10FFFF ||
                (decoded >= 0xD800 && decoded <= 0xDFFF))
                ok = false;
        }
        if (ok) {
            out.push_back(decoded);
            i += len;
        } else {
            out.push_back(kReplacement);
            ++i;
        }
    }
    return out;
}

std::string encode_utf8(const std::u32string& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            cp = kReplacement;
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

bool is_space(char32_t cp) {
    switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punctuation(char32_t cp) {
    if (cp < 0x80)
        return std::ispunct(static_cast<int>(cp)) != 0;
    // Latin-1 punctuation and symbols (skips ª º µ and the superscript and
    // fraction number forms).
    if (cp >= 0x00A1 && cp <= 0x00BF) {
        switch (cp) {
        case 0x00AA:
        case 0x00B2:
        case 0x00B3:
        case 0x00B5:
        case 0x00B9:
        case 0x00BA:
        case 0x00BC:
        case 0x00BD:
        case 0x00BE:
            return false;
        default:
            return true;
        }
    }
    if (cp == 0x00D7 || cp == 0x00F7)
        return true;
    // General punctuation, minus the space separators and invisible format
    // characters that live in the same block.
    if (cp >= 0x2000 && cp <= 0x206F) {
        if (is_space(cp))
            return false;
        if ((cp >= 0x200B && cp <= 0x200F) || (cp >= 0x202A && cp <= 0x202E) ||
            (cp >= 0x2060 && cp <= 0x2064) || (cp >= 0x2066 && cp <= 0x206F))
            return false;
        return true;
    }
    if (cp >= 0x20A0 && cp <= 0x20CF) // currency
        return true;
    if (cp == 0x2122 || cp == 0x2117 || cp == 0x2120) // ™ ℗ ℠
        return true;
    if (cp >= 0x2190 && cp <= 0x2BFF) // arrows, math, misc symbols, dingbats
        return true;
    if (cp >= 0x3001 && cp <= 0x303F) // CJK punctuation
        return true;
    if (cp >= 0xFE30 && cp <= 0xFE4F) // CJK compatibility forms
        return true;
    if (cp >= 0xFF01 && cp <= 0xFF0F)
        return true;
    if (cp >= 0xFF1A && cp <= 0xFF20)
        return true;
    if (cp >= 0xFF3B && cp <= 0xFF40)
        return true;
    if (cp >= 0xFF5B && cp <= 0xFF65)
        return true;
    if (cp >= 0xFFE0 && cp <= 0xFFE6)
        return true;
    if (cp == kReplacement)
        return true;
    if (cp >= 0x1F000 && cp <= 0x1FAFF) // emoji, symbols, pictographs
        return true;
    return false;
}

char32_t fold_char(char32_t cp) {
    if (cp < 0x80)
        return (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) // Latin-1 uppercase
        return cp + 0x20;
    if (cp >= 0x0100 && cp <= 0x017F) { // Latin Extended-A
        if (cp == 0x0130) // İ folds to plain i here
            return U'i';
        if (cp == 0x0178) // Ÿ
            return 0x00FF;
        if (cp <= 0x0137 || (cp >= 0x014A && cp <= 0x0177))
            return (cp % 2 == 0) ? cp + 1 : cp;
        if (cp >= 0x0139 && cp <= 0x0148)
            return (cp % 2 == 1) ? cp + 1 : cp;
        if (cp >= 0x0179 && cp <= 0x017E)
            return (cp % 2 == 1) ? cp + 1 : cp;
        return cp;
    }
    if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) // Greek
        return cp + 0x20;
    if (cp >= 0x0410 && cp <= 0x042F) // Cyrillic
        return cp + 0x20;
    if (cp >= 0x0400 && cp <= 0x040F)
        return cp + 0x50;
    return cp;
}

std::string fold_case(std::string_view s) {
    std::u32string cps = decode_utf8(s);
    for (auto& cp : cps)
        cp = fold_char(cp);
    return encode_utf8(cps);
}

namespace {

bool parse_numeric_entity(std::string_view body, char32_t& cp) {
    if (body.size() < 2 || body[0] != '#')
        return false;
    std::uint32_t value = 0;
    std::size_t i = 1;
    bool hex = body[1] == 'x' || body[1] == 'X';
    if (hex)
        i = 2;
    if (i >= body.size())
        return false;
    for (; i < body.size(); ++i) {
        char c = body[i];
        int digit;
        if (c >= '0' && c <= '9')
            digit = c - '0';
        else if (hex && c >= 'a' && c <= 'f')
            digit = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F')
            digit = c - 'A' + 10;
        else
            return false;
        value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(digit);
        if (value > 0x10FFFF)
            return false;
    }
    if (value >= 0xD800 && value <= 0xDFFF)
        return false;
    cp = static_cast<char32_t>(value);
    return true;
}

} // namespace

std::string decode_html_entities(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 6> named{{
        {"amp", "&"},
        {"lt", "<"},
        {"gt", ">"},
        {"quot", "\""},
        {"apos", "'"},
        {"nbsp", " "},
    }};
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        std::string_view body = s.substr(i + 1, semi - i - 1);
        bool handled = false;
        for (const auto& [name, repl] : named) {
            if (body == name) {
                out.append(repl);
                handled = true;
                break;
            }
        }
        if (!handled) {
            char32_t cp;
            if (parse_numeric_entity(body, cp)) {
                out.append(encode_utf8(std::u32string(1, cp)));
                handled = true;
            }
        }
        if (handled) {
            i = semi + 1;
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

std::vector<std::string> split_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::u32string cps = decode_utf8(s);
    std::u32string current;
    for (char32_t cp : cps) {
        if (is_space(cp)) {
            if (!current.empty()) {
                tokens.push_back(encode_utf8(current));
                current.clear();
            }
        } else {
            current.push_back(cp);
        }
    }
    if (!current.empty())
        tokens.push_back(encode_utf8(current));
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i)
            out.push_back(' ');
        out.append(tokens[i]);
    }
    return out;
}

bool starts_with_url_prefix(std::string_view token) {
    auto matches = [&](std::string_view prefix) {
        if (token.size() < prefix.size())
            return false;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            char a = static_cast<char>(std::tolower(static_cast<unsigned char>(token[i])));
            if (a != prefix[i])
                return false;
        }
        return true;
    };
    return matches("http://") || matches("https://") || matches("www.");
}

} // namespace sbd::text
