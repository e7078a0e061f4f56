#pragma once

#include "lexsteer/vocab.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lexsteer {

enum class TokenizerKind {
    // Reference tokenizer: splits on Unicode whitespace and isolates each
    // ASCII punctuation character as its own token.
    whitespace_punct,
    // Pre-tokenized input: whitespace-separated non-negative integer ids from
    // an external tokenizer. Each distinct id string becomes a vocab entry, so
    // score tables can be built against any real tokenizer's output.
    external_id_stream,
};

enum class Normalization { none, lowercase };

struct TokenizerSpec {
    TokenizerKind kind = TokenizerKind::whitespace_punct;
    Normalization normalization = Normalization::lowercase;  // ignored in id-stream mode
};

std::string to_string(TokenizerKind kind);
std::string to_string(Normalization norm);
TokenizerKind tokenizer_kind_from_string(const std::string& s);
Normalization normalization_from_string(const std::string& s);

// Tokenizes text, appending unseen tokens to the vocab with the next dense id.
// Tokenizing the same text twice yields identical id sequences.
// Throws IngestionError on malformed UTF-8 or, in id-stream mode, non-integer
// fields.
std::vector<TokenId> tokenize(std::string_view text, const TokenizerSpec& spec, Vocab& vocab);

// Same split rules against a frozen vocabulary; a token absent from the vocab
// is an IncompatibilityError (used when tokenizing prompts at decode time).
std::vector<TokenId> tokenize_lookup(std::string_view text, const TokenizerSpec& spec,
                                     const Vocab& vocab);

}  // namespace lexsteer
