#include "lexsteer/decoder.hpp"

#include "lexsteer/errors.hpp"
#include "lexsteer/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace lexsteer {

void DecodeConfig::validate() const {
    if (block_len < 1) throw ParameterError("block_len must be >= 1");
    if (num_steps < 1) throw ParameterError("num_steps must be >= 1");
    if (max_new_tokens < 1) throw ParameterError("max_new_tokens must be >= 1");
    if (block_len > max_new_tokens) {
        throw ParameterError(fmt::format("block_len {} exceeds max_new_tokens {}", block_len,
                                         max_new_tokens));
    }
    if (!(temperature > 0.0)) throw ParameterError("temperature must be positive");
    if (lambda < 0.0) throw ParameterError("lambda must be non-negative");
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
}

GenerationState make_generation_state(std::span<const TokenId> prompt_and_prefix,
                                      int32_t block_len, int32_t num_steps,
                                      int32_t block_index) {
    if (block_len < 1) throw ParameterError("block_len must be >= 1");
    GenerationState st;
    st.prefix.assign(prompt_and_prefix.begin(), prompt_and_prefix.end());
    st.block.assign(static_cast<size_t>(block_len), kMaskedSlot);
    st.schedule = commit_schedule(block_len, num_steps);
    st.block_index = block_index;
    return st;
}

std::vector<int32_t> commit_schedule(int32_t block_len, int32_t num_steps) {
    if (block_len < 1 || num_steps < 1) {
        throw ParameterError("commit_schedule needs positive block_len and num_steps");
    }
    std::vector<int32_t> schedule(static_cast<size_t>(num_steps), 0);
    int32_t remaining = block_len;
    for (int32_t t = 0; t < num_steps; ++t) {
        int32_t steps_left = num_steps - t;
        int32_t n = (remaining + steps_left - 1) / steps_left;  // ceil
        schedule[static_cast<size_t>(t)] = n;
        remaining -= n;
    }
    return schedule;
}

StepRecord denoise_step(GenerationState& state, LogitProvider& provider,
                        const BiasVector* bias, const DecodeConfig& config) {
    if (state.step >= static_cast<int32_t>(state.schedule.size())) {
        throw InternalError(fmt::format("denoise step {} past schedule of length {}", state.step,
                                        state.schedule.size()));
    }
    if (state.masked_count() < 1) {
        throw InternalError("denoise_step called with no masked slots");
    }
    const int32_t vocab_size = provider.vocab().size();
    if (bias && static_cast<int32_t>(bias->values.size()) != vocab_size) {
        throw ShapeError(fmt::format("bias length {} does not match provider vocabulary {}",
                                     bias->values.size(), vocab_size));
    }

    std::vector<TokenId> seq(state.prefix);
    seq.insert(seq.end(), state.block.begin(), state.block.end());
    std::vector<int32_t> slots;      // block-relative masked positions
    std::vector<int32_t> positions;  // absolute positions in seq
    for (size_t i = 0; i < state.block.size(); ++i) {
        if (state.block[i] == kMaskedSlot) {
            slots.push_back(static_cast<int32_t>(i));
            positions.push_back(static_cast<int32_t>(state.prefix.size() + i));
        }
    }

    auto rows = provider.logits(seq, positions);
    if (rows.size() != positions.size()) {
        throw ProviderError(fmt::format("provider returned {} logit rows for {} positions",
                                        rows.size(), positions.size()));
    }

    struct Candidate {
        int32_t slot;
        TokenId token;
        double confidence;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(slots.size());
    for (size_t j = 0; j < slots.size(); ++j) {
        const auto& row = rows[j];
        if (static_cast<int32_t>(row.size()) != vocab_size) {
            throw ProviderError(fmt::format(
                "provider returned a logit row of length {} for vocabulary of size {}",
                row.size(), vocab_size));
        }
        for (double z : row) {
            if (!std::isfinite(z)) {
                throw ProviderError(
                    fmt::format("provider returned a non-finite logit at position {}",
                                positions[j]));
            }
        }
        std::vector<double> biased;
        if (bias) {
            biased = apply_bias(row, *bias);
        } else {
            biased.assign(row.begin(), row.end());
        }
        SteeredDistribution dist = steered_distribution(biased, config.temperature);
        RngStream rng = decode_rng(config.seed, static_cast<uint64_t>(state.block_index),
                                   static_cast<uint64_t>(state.step),
                                   static_cast<uint64_t>(slots[j]));
        TokenId token = sample_token(dist, rng, config.greedy);
        candidates.push_back({slots[j], token, dist.confidence});
    }

    const int32_t to_commit = state.schedule[static_cast<size_t>(state.step)];
    if (to_commit > static_cast<int32_t>(candidates.size())) {
        throw InternalError(fmt::format("schedule asks for {} commits but only {} slots remain",
                                        to_commit, candidates.size()));
    }
    // Stable sort on descending confidence: exact ties keep ascending slot
    // order, which is the documented lowest-position tie-break.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         return a.confidence > b.confidence;
                     });

    StepRecord record;
    record.block_index = state.block_index;
    record.step = state.step;
    for (int32_t c = 0; c < to_commit; ++c) {
        const Candidate& cand = candidates[static_cast<size_t>(c)];
        state.block[static_cast<size_t>(cand.slot)] = cand.token;
        ++state.committed;
        record.commits.push_back({cand.slot, cand.token, cand.confidence});
    }
    std::sort(record.commits.begin(), record.commits.end(),
              [](const CommitEvent& a, const CommitEvent& b) { return a.position < b.position; });
    ++state.step;
    return record;
}

std::vector<TokenId> decode(std::span<const TokenId> prompt, LogitProvider& provider,
                            const BiasVector* bias, const DecodeConfig& config,
                            const StepCallback& on_step) {
    config.validate();
    if (prompt.empty()) {
        throw ParameterError("prompt must be non-empty");
    }
    if (bias && static_cast<int32_t>(bias->values.size()) != provider.vocab().size()) {
        throw ShapeError(fmt::format("bias length {} does not match provider vocabulary {}",
                                     bias->values.size(), provider.vocab().size()));
    }
    const std::optional<TokenId> eos = provider.vocab().special(SpecialRole::eos);

    std::vector<TokenId> out;
    std::vector<TokenId> prefix(prompt.begin(), prompt.end());
    int32_t remaining = config.max_new_tokens;
    int32_t block_index = 0;
    while (remaining > 0) {
        const int32_t len = std::min(config.block_len, remaining);
        GenerationState state = make_generation_state(prefix, len, config.num_steps, block_index);
        for (int32_t t = 0; t < config.num_steps; ++t) {
            if (state.masked_count() == 0) break;  // trailing zero-commit steps
            StepRecord record = denoise_step(state, provider, bias, config);
            if (on_step) on_step(record);
        }
        if (state.masked_count() != 0) {
            throw InternalError("block left masked slots after the full schedule");
        }
        bool saw_eos = false;
        for (TokenId token : state.block) {
            if (eos && token == *eos) {
                saw_eos = true;
                break;
            }
            out.push_back(token);
            prefix.push_back(token);
        }
        if (saw_eos) break;
        remaining -= len;
        ++block_index;
    }
    return out;
}

}  // namespace lexsteer
