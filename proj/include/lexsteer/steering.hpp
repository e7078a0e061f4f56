#pragma once

#include "lexsteer/rng.hpp"
#include "lexsteer/scores.hpp"
#include "lexsteer/vocab.hpp"

#include <span>
#include <string>
#include <vector>

namespace lexsteer {

inline constexpr double kDefaultTau = 8.0;
inline constexpr double kDefaultLambdaLlada = 0.7;
inline constexpr double kDefaultLambdaDream = 0.5;

// Fixed steering vector b(v) = lambda * clip(s(v), -tau, tau), materialized
// against a decode-time vocabulary. Special ids and tokens absent from the
// score table get 0. Computed once per decode and reused at every step.
struct BiasVector {
    std::vector<double> values;
    double lambda = 0.0;
    double tau = 0.0;
    std::string source;  // "<class>@<vocab_sha>"
};

// Score tables are keyed by token string, so one table can serve any
// provider; decode-vocab tokens missing from the table simply get no bias.
BiasVector build_bias(const ScoreTable& table, double lambda, double tau,
                      const Vocab& decode_vocab);

// Elementwise sum; the input logits are not mutated. Length mismatch is a
// ShapeError.
std::vector<double> apply_bias(std::span<const double> logits, const BiasVector& bias);

struct SteeredDistribution {
    std::vector<double> probs;  // softmax(biased_logits / temperature)
    double confidence = 0.0;    // max of softmax(biased_logits) at temperature 1
    double temperature = 1.0;
};

// Numerically stable softmax of the biased logits, tempered for sampling;
// the confidence comes from the untempered distribution of the same logits.
SteeredDistribution steered_distribution(std::span<const double> biased_logits,
                                         double temperature);

// Greedy mode returns the argmax with lowest-id tie-break; sampling mode draws
// from probs using the supplied stream. Deterministic given (probs, stream).
TokenId sample_token(const SteeredDistribution& dist, RngStream& rng, bool greedy);

}  // namespace lexsteer
