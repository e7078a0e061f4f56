#pragma once

#include "lexsteer/corpus.hpp"
#include "lexsteer/vocab.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lexsteer {

inline constexpr double kDefaultAlpha = 0.01;

// Dirichlet prior over the vocabulary: mass(v) = alpha * pooled(v),
// total = sum_v mass(v).
struct Prior {
    std::vector<double> mass;
    double total = 0.0;
    double alpha = 0.0;
};

struct ScoreTableMeta {
    double alpha = 0.0;
    std::string vocab_sha;
    int32_t num_classes = 0;
    std::vector<std::string> class_names;
    std::map<std::string, std::string> params;  // creation parameters (tokenizer, ...)
};

// Per-class token scores over the vocabulary. Tokens with pooled count zero
// carry delta = variance = zscore = 0 (no steering signal); genuine variances
// are strictly positive, so 0 doubles as the no-signal sentinel.
struct ScoreTable {
    std::string class_name;
    std::vector<std::string> tokens;  // indexed by id
    std::vector<double> delta;
    std::vector<double> variance;
    std::vector<double> zscore;
    ScoreTableMeta meta;

    int32_t vocab_size() const { return static_cast<int32_t>(tokens.size()); }
};

// Errors: alpha <= 0, or fewer than two tokens with positive pooled count.
Prior build_prior(std::span<const int64_t> pooled, double alpha);

// One-vs-rest prior-smoothed log-odds delta_k(v):
//   log[(c_k + a~) / (N_k + A - c_k - a~)] - log[(c_~k + a~) / (N_~k + A - c_~k - a~)]
// Zero-pooled tokens get 0. A non-positive denominator (a token comprising an
// entire side) is a NumericalError naming the token id.
std::vector<double> log_odds(const ClassCounts& counts, int k, const Prior& prior);

// Var[delta_k(v)] = 1/(c_k(v) + a~(v)) + 1/(c_~k(v) + a~(v)) for pooled-positive
// tokens; 0 sentinel otherwise.
std::vector<double> log_odds_variance(const ClassCounts& counts, int k, const Prior& prior);

// s_k(v) = delta(v) / sqrt(variance(v)); zero stays zero.
std::vector<double> normalize_scores(std::span<const double> delta,
                                     std::span<const double> variance);

// One table per class via the same one-vs-rest procedure. Fails before
// producing any table if a class is empty.
std::vector<ScoreTable> build_score_tables(const Vocab& vocab, const ClassCounts& counts,
                                           double alpha,
                                           std::map<std::string, std::string> params = {});

// Tab-separated persistence. `#!` header lines carry alpha, class, classes, k
// and vocab_sha; rows are `token id delta variance zscore` sorted by
// descending zscore (ties by ascending id), numbers with 17 significant
// digits. load(save(t)) reproduces every numeric field exactly.
void save_table(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable load_table(const std::filesystem::path& path);

}  // namespace lexsteer
