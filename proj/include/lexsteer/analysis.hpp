#pragma once

#include "lexsteer/decoder.hpp"
#include "lexsteer/mock_model.hpp"
#include "lexsteer/scores.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lexsteer {

inline constexpr double kDefaultMarkerThreshold = 2.0;
inline constexpr int32_t kDefaultEfficacySequences = 50;

// --- Cue strength -----------------------------------------------------------

struct CueStrengthRow {
    std::string class_name;
    std::vector<int64_t> counts;  // tokens with zscore strictly above each threshold
    double max_z = 0.0;
};

struct CueStrengthReport {
    std::vector<double> thresholds;
    std::vector<CueStrengthRow> rows;
};

// Thresholds must be strictly ascending and non-empty; default {2, 3, 5}.
CueStrengthReport cue_strength(const std::vector<ScoreTable>& tables,
                               std::vector<double> thresholds = {2.0, 3.0, 5.0});

// --- Top tokens and overlap -------------------------------------------------

struct RankedToken {
    TokenId id;
    std::string token;
    double zscore;
};

// Descending zscore, ties by lowest id; length min(n, |V|).
std::vector<RankedToken> top_tokens(const ScoreTable& table, int32_t n);

// Jaccard similarity of the two tables' top-k token sets (top_tokens ranking).
// Tables must share a vocabulary fingerprint.
double jaccard_overlap(const ScoreTable& a, const ScoreTable& b, int32_t k);

struct TopTokensReport {
    int32_t n = 0;
    struct Entry {
        std::string class_name;
        int32_t rank;
        std::string token;
        double zscore;
    };
    std::vector<Entry> entries;
};

struct JaccardReport {
    std::vector<int32_t> k_values;
    struct Entry {
        std::string class_a;
        std::string class_b;
        int32_t k;
        double jaccard;
    };
    std::vector<Entry> entries;
};

TopTokensReport build_top_tokens_report(const std::vector<ScoreTable>& tables, int32_t n);
JaccardReport build_jaccard_report(const std::vector<ScoreTable>& tables,
                                   std::span<const int32_t> k_values);

// --- Synthetic steering efficacy --------------------------------------------

struct EfficacyConfig {
    DecodeConfig decode;                 // decode.seed is the master seed
    TokenizerSpec tokenizer;
    double alpha = kDefaultAlpha;
    double marker_threshold = kDefaultMarkerThreshold;
    int32_t num_sequences = kDefaultEfficacySequences;
    std::vector<TokenId> prompt;         // empty: most frequent pooled token
};

struct EfficacyRow {
    double lambda = 0.0;
    double marker_rate = 0.0;  // mean fraction of generated tokens with zscore > threshold
    double target_rate = 0.0;  // fraction of outputs the bag-of-scores classifier assigns to k
};

struct EfficacyReport {
    std::string target_class;
    double marker_threshold = 0.0;
    uint64_t master_seed = 0;
    int32_t num_sequences = 0;
    std::vector<EfficacyRow> rows;  // one per lambda, in grid order
};

// Decodes num_sequences outputs per lambda with the mock model and measures
// how often target-class marker tokens appear. Per-sequence seeds are
// derive_seed(master, i) and are shared across lambda values, so the lambda=0
// row is bit-identical to an unsteered decode with the same seeds. The grid
// must contain 0 (the control row).
EfficacyReport steering_efficacy(const std::filesystem::path& corpus_root,
                                 const std::string& target_class,
                                 std::span<const double> lambda_grid,
                                 const EfficacyConfig& config, MockModel& model);

// --- Report persistence ------------------------------------------------------

void save_cue_strength_report(const CueStrengthReport&, const std::filesystem::path&);
CueStrengthReport load_cue_strength_report(const std::filesystem::path&);
void save_top_tokens_report(const TopTokensReport&, const std::filesystem::path&);
TopTokensReport load_top_tokens_report(const std::filesystem::path&);
void save_jaccard_report(const JaccardReport&, const std::filesystem::path&);
JaccardReport load_jaccard_report(const std::filesystem::path&);
void save_efficacy_report(const EfficacyReport&, const std::filesystem::path&);
EfficacyReport load_efficacy_report(const std::filesystem::path&);

}  // namespace lexsteer
