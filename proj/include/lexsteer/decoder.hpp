#pragma once

#include "lexsteer/provider.hpp"
#include "lexsteer/steering.hpp"
#include "lexsteer/vocab.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lexsteer {

inline constexpr int32_t kDefaultNumSteps = 128;
inline constexpr int32_t kDefaultBlockLen = 128;

struct DecodeConfig {
    int32_t block_len = kDefaultBlockLen;
    int32_t num_steps = kDefaultNumSteps;
    int32_t max_new_tokens = kDefaultBlockLen;
    double temperature = 1.0;
    bool greedy = false;
    uint64_t seed = 0;
    double lambda = kDefaultLambdaLlada;
    double tau = kDefaultTau;
    std::string profile = "llada";

    void validate() const;  // throws ParameterError
};

// One block being denoised: prefix is the prompt plus all previously
// committed blocks; block holds committed ids or kMaskedSlot. A committed
// slot is never modified or re-masked.
struct GenerationState {
    std::vector<TokenId> prefix;
    std::vector<TokenId> block;
    std::vector<int32_t> schedule;  // commits per step; sums to block size
    int32_t step = 0;
    int32_t block_index = 0;
    int32_t committed = 0;

    int32_t masked_count() const {
        return static_cast<int32_t>(block.size()) - committed;
    }
};

GenerationState make_generation_state(std::span<const TokenId> prompt_and_prefix,
                                      int32_t block_len, int32_t num_steps,
                                      int32_t block_index = 0);

struct CommitEvent {
    int32_t position;  // slot index within the block
    TokenId token;
    double confidence;
};

struct StepRecord {
    int32_t block_index = 0;
    int32_t step = 0;
    std::vector<CommitEvent> commits;  // sorted by position
};

using StepCallback = std::function<void(const StepRecord&)>;

// Greedy ceil(remaining / steps_remaining) commit counts: length num_steps,
// entries sum to block_len, zeros once the block is exhausted. Reduces to one
// commit per step when num_steps == block_len.
std::vector<int32_t> commit_schedule(int32_t block_len, int32_t num_steps);

// One denoising step: fetch logits for every masked position, add the bias,
// sample a candidate per position, compute the untempered steered confidence,
// and commit the schedule[step] highest-confidence candidates (ties by lowest
// position index). bias may be null for unsteered decoding.
StepRecord denoise_step(GenerationState& state, LogitProvider& provider,
                        const BiasVector* bias, const DecodeConfig& config);

// Block-wise decode: append a masked block (truncated to the remaining
// budget), run num_steps denoising steps, advance; stops after max_new_tokens
// or a committed end-of-sequence token (which truncates the output at the EOS
// position). Returns the generated ids; the prompt is not included.
std::vector<TokenId> decode(std::span<const TokenId> prompt, LogitProvider& provider,
                            const BiasVector* bias, const DecodeConfig& config,
                            const StepCallback& on_step = {});

}  // namespace lexsteer
