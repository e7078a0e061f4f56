#include "lexsteer/tokenizer.hpp"

#include "lexsteer/errors.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace lexsteer;

TEST_SUITE("tokenizer") {

TEST_CASE("empty input yields no tokens") {
    Vocab vocab;
    CHECK(tokenize("", {}, vocab).empty());
    CHECK(vocab.size() == 0);
}

TEST_CASE("lowercase normalization makes repeated words identical") {
    Vocab vocab;
    TokenizerSpec spec;  // whitespace-punct, lowercase
    auto ids = tokenize("Hi, hi", spec, vocab);
    REQUIRE(ids.size() == 3);
    CHECK(vocab.token(ids[0]) == "hi");
    CHECK(vocab.token(ids[1]) == ",");
    CHECK(ids[0] == ids[2]);
}

TEST_CASE("normalization none keeps case distinct") {
    Vocab vocab;
    TokenizerSpec spec{TokenizerKind::whitespace_punct, Normalization::none};
    auto ids = tokenize("Hi hi", spec, vocab);
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] != ids[1]);
    CHECK(vocab.token(ids[0]) == "Hi");
}

TEST_CASE("three-line fixture matches a hand-tokenized oracle") {
    // Hand tokenization rules: split on Unicode whitespace (including the
    // U+00A0 between "wide" and "gap"), isolate each ASCII punctuation
    // character, lowercase ASCII letters, keep non-ASCII word characters.
    std::string text =
        "Don't panic!\n"
        "wide gap\tand  spaces\n"
        "naïve (option-2)";
    std::vector<std::string> expected = {
        "don", "'", "t", "panic", "!",
        "wide", "gap", "and", "spaces",
        "naïve", "(", "option", "-", "2", ")",
    };
    Vocab vocab;
    auto ids = tokenize(text, {}, vocab);
    REQUIRE(ids.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
        CHECK(vocab.token(ids[i]) == expected[i]);
    }
}

TEST_CASE("tokenizing twice yields identical id sequences") {
    Vocab vocab;
    std::string text = "a b, c a";
    auto first = tokenize(text, {}, vocab);
    auto second = tokenize(text, {}, vocab);
    CHECK(first == second);
}

TEST_CASE("malformed UTF-8 raises an ingestion error") {
    Vocab vocab;
    std::string bad = "ok \xFF bad";
    CHECK_THROWS_AS(tokenize(bad, {}, vocab), IngestionError);
    std::string truncated = "caf\xC3";
    CHECK_THROWS_AS(tokenize(truncated, {}, vocab), IngestionError);
    std::string overlong = "\xC0\xAF";
    CHECK_THROWS_AS(tokenize(overlong, {}, vocab), IngestionError);
}

TEST_CASE("id-stream mode interns canonical decimal strings") {
    Vocab vocab;
    TokenizerSpec spec{TokenizerKind::external_id_stream, Normalization::none};
    auto ids = tokenize("3 1 4\n1 007", spec, vocab);
    REQUIRE(ids.size() == 5);
    CHECK(vocab.token(ids[0]) == "3");
    CHECK(ids[1] == ids[3]);   // "1" twice
    CHECK(vocab.token(ids[4]) == "7");  // leading zeros are canonicalized
    CHECK(vocab.size() == 4);  // dense ids for 3, 1, 4, 7

    CHECK_THROWS_AS(tokenize("12 x9", spec, vocab), IngestionError);
    CHECK_THROWS_AS(tokenize("-4", spec, vocab), IngestionError);
}

TEST_CASE("tokenize_lookup rejects out-of-vocabulary tokens") {
    Vocab vocab;
    tokenize("known words", {}, vocab);
    CHECK(tokenize_lookup("known words", {}, vocab) == tokenize("known words", {}, vocab));
    CHECK_THROWS_AS(tokenize_lookup("unknown", {}, vocab), IncompatibilityError);
}

}  // TEST_SUITE
