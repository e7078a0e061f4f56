#pragma once

#include "lexsteer/provider.hpp"
#include "lexsteer/tokenizer.hpp"
#include "lexsteer/vocab.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace lexsteer {

inline constexpr double kDefaultMu = 0.7;
inline constexpr double kDefaultKappa = 0.1;

// Reference logit provider: an interpolated bigram/unigram model trained on a
// labeled corpus (all classes pooled). Each masked position is conditioned on
// the nearest committed token to its left, or a begin-of-document context when
// none exists. This is a deliberate simplification; the model exists to
// exercise steering and commit dynamics, not to produce good language.
class MockModel final : public LogitProvider {
  public:
    static constexpr TokenId kBeginContext = -1;  // bigram-map key for document start

    const Vocab& vocab() const override { return vocab_; }

    std::vector<std::vector<double>> logits(std::span<const TokenId> seq,
                                            std::span<const int32_t> positions) override;

    double mu() const { return mu_; }
    double kappa() const { return kappa_; }
    const std::vector<double>& unigram() const { return unigram_; }
    // Smoothed probability row for a left-context id (kBeginContext for
    // document start); unseen contexts fall back to the all-kappa row.
    const std::vector<double>& bigram_row(TokenId prev) const;

  private:
    friend MockModel train_mock(const std::filesystem::path&, const TokenizerSpec&, double,
                                double);
    friend MockModel load_mock(const std::filesystem::path& path);
    friend void save_mock(const MockModel&, const std::filesystem::path&);

    void rebuild_probabilities();

    Vocab vocab_;
    double mu_ = kDefaultMu;
    double kappa_ = kDefaultKappa;
    // Exact counts are the persisted state; probabilities are derived.
    std::vector<int64_t> unigram_counts_;
    std::map<TokenId, std::map<TokenId, int64_t>> bigram_counts_;

    std::vector<double> unigram_;
    std::map<TokenId, std::vector<double>> bigram_;
    std::vector<double> fallback_row_;
};

// Add-kappa smoothed maximum-likelihood unigram and bigram estimates over the
// pooled corpus; mask/eos/pad specials are appended to the vocabulary and kept
// out of the smoothing support (they get a vanishing probability floor so all
// logits stay finite). Empty corpus is a ConfigError.
MockModel train_mock(const std::filesystem::path& corpus_root, const TokenizerSpec& spec,
                     double mu = kDefaultMu, double kappa = kDefaultKappa);

// Tab-separated persistence of vocab entries and exact counts; probabilities
// are recomputed on load, so the round-trip is lossless.
void save_mock(const MockModel& model, const std::filesystem::path& path);
MockModel load_mock(const std::filesystem::path& path);

}  // namespace lexsteer
