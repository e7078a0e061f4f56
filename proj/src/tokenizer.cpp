#include "lexsteer/tokenizer.hpp"

#include "lexsteer/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstdint>

namespace lexsteer {

namespace {

bool is_unicode_space(char32_t c) {
    switch (c) {
        case 0x0009: case 0x000A: case 0x000B: case 0x000C: case 0x000D:
        case 0x0020: case 0x0085: case 0x00A0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

bool is_ascii_punct(char32_t c) {
    if (c >= 0x80) return false;
    char ch = static_cast<char>(c);
    return (ch >= '!' && ch <= '/') || (ch >= ':' && ch <= '@') ||
           (ch >= '[' && ch <= '`') || (ch >= '{' && ch <= '~');
}

char32_t ascii_lower(char32_t c) {
    return (c >= 'A' && c <= 'Z') ? c + 32 : c;
}

void encode_utf8(char32_t c, std::string& out) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

// Strict UTF-8 decode: rejects truncated sequences, stray continuation bytes,
// overlong encodings, surrogates, and codepoints above U+10FFFF.
std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    size_t i = 0;
    auto fail = [&](size_t at) -> std::u32string {
        throw IngestionError(fmt::format("malformed UTF-8 at byte offset {}", at));
    };
    while (i < text.size()) {
        unsigned char b0 = static_cast<unsigned char>(text[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int extra;
        char32_t cp;
        char32_t min_cp;
        if ((b0 & 0xE0) == 0xC0) { extra = 1; cp = b0 & 0x1F; min_cp = 0x80; }
        else if ((b0 & 0xF0) == 0xE0) { extra = 2; cp = b0 & 0x0F; min_cp = 0x800; }
        else if ((b0 & 0xF8) == 0xF0) { extra = 3; cp = b0 & 0x07; min_cp = 0x10000; }
        else return fail(i);
        if (i + static_cast<size_t>(extra) >= text.size()) return fail(i);
        for (int k = 1; k <= extra; ++k) {
            unsigned char b = static_cast<unsigned char>(text[i + static_cast<size_t>(k)]);
            if ((b & 0xC0) != 0x80) return fail(i);
            cp = (cp << 6) | (b & 0x3F);
        }
        if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return fail(i);
        out.push_back(cp);
        i += 1 + static_cast<size_t>(extra);
    }
    return out;
}

template <typename Lookup>
std::vector<TokenId> tokenize_reference(std::string_view text, const TokenizerSpec& spec,
                                        Lookup&& lookup) {
    std::u32string cps = decode_utf8(text);
    std::vector<TokenId> ids;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            ids.push_back(lookup(word));
            word.clear();
        }
    };
    for (char32_t c : cps) {
        if (is_unicode_space(c)) {
            flush();
        } else if (is_ascii_punct(c)) {
            flush();
            std::string punct(1, static_cast<char>(c));
            ids.push_back(lookup(punct));
        } else {
            if (spec.normalization == Normalization::lowercase) c = ascii_lower(c);
            encode_utf8(c, word);
        }
    }
    flush();
    return ids;
}

template <typename Lookup>
std::vector<TokenId> tokenize_id_stream(std::string_view text, Lookup&& lookup) {
    std::vector<TokenId> ids;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                                   text[i] == '\r' || text[i] == '\v' || text[i] == '\f')) {
            ++i;
        }
        size_t start = i;
        while (i < text.size() && !(text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                                    text[i] == '\r' || text[i] == '\v' || text[i] == '\f')) {
            ++i;
        }
        if (start == i) break;
        std::string_view field = text.substr(start, i - start);
        uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw IngestionError(
                fmt::format("id-stream field '{}' is not a non-negative integer", field));
        }
        // Canonical decimal form so "007" and "7" name the same token.
        std::string canonical = std::to_string(value);
        ids.push_back(lookup(canonical));
    }
    return ids;
}

}  // namespace

std::string to_string(TokenizerKind kind) {
    return kind == TokenizerKind::whitespace_punct ? "whitespace-punct" : "external-id-stream";
}

std::string to_string(Normalization norm) {
    return norm == Normalization::none ? "none" : "lowercase";
}

TokenizerKind tokenizer_kind_from_string(const std::string& s) {
    if (s == "whitespace-punct") return TokenizerKind::whitespace_punct;
    if (s == "external-id-stream") return TokenizerKind::external_id_stream;
    throw ParameterError(fmt::format("unknown tokenizer kind '{}'", s));
}

Normalization normalization_from_string(const std::string& s) {
    if (s == "none") return Normalization::none;
    if (s == "lowercase") return Normalization::lowercase;
    throw ParameterError(fmt::format("unknown normalization '{}'", s));
}

std::vector<TokenId> tokenize(std::string_view text, const TokenizerSpec& spec, Vocab& vocab) {
    auto lookup = [&vocab](const std::string& tok) { return vocab.intern(tok); };
    if (spec.kind == TokenizerKind::external_id_stream) {
        return tokenize_id_stream(text, lookup);
    }
    return tokenize_reference(text, spec, lookup);
}

std::vector<TokenId> tokenize_lookup(std::string_view text, const TokenizerSpec& spec,
                                     const Vocab& vocab) {
    auto lookup = [&vocab](const std::string& tok) {
        auto id = vocab.find(tok);
        if (!id) {
            throw IncompatibilityError(fmt::format("token '{}' is not in the vocabulary", tok));
        }
        return *id;
    };
    if (spec.kind == TokenizerKind::external_id_stream) {
        return tokenize_id_stream(text, lookup);
    }
    return tokenize_reference(text, spec, lookup);
}

}  // namespace lexsteer
