#include "lexsteer/steering.hpp"

#include "lexsteer/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace lexsteer {

BiasVector build_bias(const ScoreTable& table, double lambda, double tau,
                      const Vocab& decode_vocab) {
    if (!(tau > 0.0)) {
        throw ParameterError(fmt::format("tau must be positive, got {}", tau));
    }
    if (lambda < 0.0) {
        throw ParameterError(fmt::format("lambda must be non-negative, got {}", lambda));
    }
    std::unordered_map<std::string_view, size_t> by_token;
    by_token.reserve(table.tokens.size());
    for (size_t v = 0; v < table.tokens.size(); ++v) by_token.emplace(table.tokens[v], v);

    BiasVector bias;
    bias.lambda = lambda;
    bias.tau = tau;
    bias.source = fmt::format("{}@{}", table.class_name, table.meta.vocab_sha);
    bias.values.assign(static_cast<size_t>(decode_vocab.size()), 0.0);
    for (TokenId id = 0; id < decode_vocab.size(); ++id) {
        if (decode_vocab.is_special(id)) continue;
        auto it = by_token.find(decode_vocab.token(id));
        if (it == by_token.end()) continue;
        double s = table.zscore[it->second];
        bias.values[static_cast<size_t>(id)] = lambda * std::clamp(s, -tau, tau);
    }
    return bias;
}

std::vector<double> apply_bias(std::span<const double> logits, const BiasVector& bias) {
    if (logits.size() != bias.values.size()) {
        throw ShapeError(fmt::format("logits length {} does not match bias length {}",
                                     logits.size(), bias.values.size()));
    }
    std::vector<double> out(logits.size());
    for (size_t v = 0; v < logits.size(); ++v) out[v] = logits[v] + bias.values[v];
    return out;
}

namespace {

// Max-subtracted softmax; requires finite, non-empty input.
std::vector<double> stable_softmax(std::span<const double> logits) {
    double max_logit = *std::max_element(logits.begin(), logits.end());
    std::vector<double> probs(logits.size());
    double sum = 0.0;
    for (size_t v = 0; v < logits.size(); ++v) {
        probs[v] = std::exp(logits[v] - max_logit);
        sum += probs[v];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

}  // namespace

SteeredDistribution steered_distribution(std::span<const double> biased_logits,
                                         double temperature) {
    if (!(temperature > 0.0)) {
        throw ParameterError(fmt::format("temperature must be positive, got {}", temperature));
    }
    if (biased_logits.empty()) {
        throw ShapeError("cannot build a distribution over an empty vocabulary");
    }
    for (double z : biased_logits) {
        if (!std::isfinite(z)) {
            throw NumericalError("non-finite logit");
        }
    }
    SteeredDistribution dist;
    dist.temperature = temperature;
    std::vector<double> untempered = stable_softmax(biased_logits);
    dist.confidence = *std::max_element(untempered.begin(), untempered.end());
    if (temperature == 1.0) {
        dist.probs = std::move(untempered);
    } else {
        std::vector<double> scaled(biased_logits.size());
        for (size_t v = 0; v < biased_logits.size(); ++v) scaled[v] = biased_logits[v] / temperature;
        dist.probs = stable_softmax(scaled);
    }
    return dist;
}

TokenId sample_token(const SteeredDistribution& dist, RngStream& rng, bool greedy) {
    const auto& p = dist.probs;
    if (greedy) {
        size_t best = 0;
        for (size_t v = 1; v < p.size(); ++v) {
            if (p[v] > p[best]) best = v;  // strict: ties keep the lowest id
        }
        return static_cast<TokenId>(best);
    }
    double u = rng.next_uniform();
    double cdf = 0.0;
    for (size_t v = 0; v < p.size(); ++v) {
        cdf += p[v];
        if (u < cdf) return static_cast<TokenId>(v);
    }
    return static_cast<TokenId>(p.size() - 1);  // guard against rounding shortfall
}

}  // namespace lexsteer
