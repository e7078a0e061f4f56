#pragma once

#include "lexsteer/vocab.hpp"

#include <span>
#include <vector>

namespace lexsteer {

// Marker for a masked slot in the sequences handed to providers.
inline constexpr TokenId kMaskedSlot = -1;

// Behavioral contract for anything that can score masked positions: given
// (prompt ++ committed/masked block) and a set of masked positions, return one
// finite logit vector over the provider's vocabulary per requested position.
// Must be deterministic for identical inputs.
class LogitProvider {
  public:
    virtual ~LogitProvider() = default;

    virtual const Vocab& vocab() const = 0;

    // seq uses kMaskedSlot at masked positions; positions index into seq.
    // Returns one row per requested position, in the requested order.
    virtual std::vector<std::vector<double>> logits(std::span<const TokenId> seq,
                                                    std::span<const int32_t> positions) = 0;
};

}  // namespace lexsteer
