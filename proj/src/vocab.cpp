#include "lexsteer/vocab.hpp"

#include "lexsteer/errors.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cstring>

namespace lexsteer {

TokenId Vocab::intern(std::string_view token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    TokenId id = static_cast<TokenId>(tokens_.size());
    tokens_.emplace_back(token);
    index_.emplace(tokens_.back(), id);
    return id;
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocab::token(TokenId id) const {
    if (id < 0 || id >= size()) {
        throw InternalError(fmt::format("token id {} outside vocabulary of size {}", id, size()));
    }
    return tokens_[static_cast<size_t>(id)];
}

void Vocab::set_special(SpecialRole role, TokenId id) {
    if (id < 0 || id >= size()) {
        throw ParameterError(
            fmt::format("special id {} is not a valid id in a vocabulary of size {}", id, size()));
    }
    specials_[static_cast<int>(role)] = id;
}

std::optional<TokenId> Vocab::special(SpecialRole role) const {
    return specials_[static_cast<int>(role)];
}

bool Vocab::is_special(TokenId id) const {
    for (const auto& s : specials_) {
        if (s && *s == id) return true;
    }
    return false;
}

std::vector<TokenId> Vocab::special_ids() const {
    std::vector<TokenId> ids;
    for (const auto& s : specials_) {
        if (s) ids.push_back(*s);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::string Vocab::fingerprint() const {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw InternalError("SHA-256 init failed");
    }
    auto feed = [&](const void* data, size_t len) {
        if (EVP_DigestUpdate(ctx, data, len) != 1) {
            EVP_MD_CTX_free(ctx);
            throw InternalError("SHA-256 update failed");
        }
    };
    for (size_t id = 0; id < tokens_.size(); ++id) {
        feed(tokens_[id].data(), tokens_[id].size());
        std::string tail = fmt::format("\x1f{}\n", id);
        feed(tail.data(), tail.size());
    }
    static constexpr const char* kRoleNames[3] = {"mask", "eos", "pad"};
    for (int r = 0; r < 3; ++r) {
        std::string line = specials_[r]
                               ? fmt::format("special:{}={}\n", kRoleNames[r], *specials_[r])
                               : fmt::format("special:{}=-\n", kRoleNames[r]);
        feed(line.data(), line.size());
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw InternalError("SHA-256 final failed");
    }
    EVP_MD_CTX_free(ctx);
    std::string hex;
    hex.reserve(2 * len);
    static constexpr char kHex[] = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0xf]);
    }
    return hex;
}

}  // namespace lexsteer
