#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexsteer {

using TokenId = int32_t;

enum class SpecialRole { mask = 0, eos = 1, pad = 2 };

// Bijective token-string <-> dense-id mapping shared by counting, scoring and
// decoding. Ids are assigned in first-seen order and are contiguous in
// [0, size()).
class Vocab {
  public:
    // Returns the existing id, or appends the token with the next dense id.
    TokenId intern(std::string_view token);

    std::optional<TokenId> find(std::string_view token) const;

    const std::string& token(TokenId id) const;

    int32_t size() const { return static_cast<int32_t>(tokens_.size()); }

    // Flags an existing id as the mask / end-of-sequence / padding token.
    void set_special(SpecialRole role, TokenId id);
    std::optional<TokenId> special(SpecialRole role) const;
    bool is_special(TokenId id) const;
    std::vector<TokenId> special_ids() const;  // sorted, deduplicated

    // SHA-256 over the canonical serialization of entries and special roles.
    // Two vocabs with equal fingerprints are interchangeable.
    std::string fingerprint() const;

  private:
    struct StringHash {
        using is_transparent = void;
        size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
    std::optional<TokenId> specials_[3];
};

}  // namespace lexsteer
