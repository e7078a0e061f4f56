#include "lexsteer/mock_model.hpp"

#include "lexsteer/corpus.hpp"
#include "lexsteer/errors.hpp"
#include "lexsteer/tsv.hpp"

#include <fmt/format.h>

#include <cmath>

namespace lexsteer {

namespace {

constexpr const char* kMaskToken = "<mask>";
constexpr const char* kEosToken = "</s>";
constexpr const char* kPadToken = "<pad>";

// Probability floor for special ids: excluded from the smoothing support but
// kept strictly positive so every logit is finite.
constexpr double kSpecialFloor = 1e-30;

}  // namespace

void MockModel::rebuild_probabilities() {
    const size_t width = static_cast<size_t>(vocab_.size());
    int64_t real_tokens = 0;
    for (TokenId id = 0; id < vocab_.size(); ++id) {
        if (!vocab_.is_special(id)) ++real_tokens;
    }
    if (real_tokens == 0) {
        throw InternalError("mock model vocabulary has no non-special tokens");
    }
    auto build_row = [&](const std::map<TokenId, int64_t>* counts, int64_t total) {
        std::vector<double> row(width, 0.0);
        const double denom = static_cast<double>(total) +
                             kappa_ * static_cast<double>(real_tokens);
        double sum = 0.0;
        for (TokenId id = 0; id < vocab_.size(); ++id) {
            size_t v = static_cast<size_t>(id);
            if (vocab_.is_special(id)) {
                row[v] = kSpecialFloor;
            } else {
                int64_t c = 0;
                if (counts) {
                    auto it = counts->find(id);
                    if (it != counts->end()) c = it->second;
                }
                row[v] = (static_cast<double>(c) + kappa_) / denom;
            }
            sum += row[v];
        }
        for (double& p : row) p /= sum;
        return row;
    };

    std::map<TokenId, int64_t> unigram_map;
    int64_t unigram_total = 0;
    for (TokenId id = 0; id < vocab_.size(); ++id) {
        size_t v = static_cast<size_t>(id);
        if (v < unigram_counts_.size() && unigram_counts_[v] > 0) {
            unigram_map[id] = unigram_counts_[v];
            unigram_total += unigram_counts_[v];
        }
    }
    unigram_ = build_row(&unigram_map, unigram_total);

    bigram_.clear();
    for (const auto& [prev, row_counts] : bigram_counts_) {
        int64_t total = 0;
        for (const auto& [next, c] : row_counts) total += c;
        bigram_[prev] = build_row(&row_counts, total);
    }
    fallback_row_ = build_row(nullptr, 0);
}

const std::vector<double>& MockModel::bigram_row(TokenId prev) const {
    auto it = bigram_.find(prev);
    return it == bigram_.end() ? fallback_row_ : it->second;
}

std::vector<std::vector<double>> MockModel::logits(std::span<const TokenId> seq,
                                                   std::span<const int32_t> positions) {
    std::vector<std::vector<double>> out;
    out.reserve(positions.size());
    const size_t width = static_cast<size_t>(vocab_.size());
    for (int32_t pos : positions) {
        if (pos < 0 || static_cast<size_t>(pos) > seq.size()) {
            throw ProviderError(fmt::format("position {} outside sequence of length {}", pos,
                                            seq.size()));
        }
        TokenId prev = kBeginContext;
        for (int32_t i = pos - 1; i >= 0; --i) {
            if (seq[static_cast<size_t>(i)] != kMaskedSlot) {
                prev = seq[static_cast<size_t>(i)];
                break;
            }
        }
        const std::vector<double>& big = bigram_row(prev);
        std::vector<double> row(width);
        for (size_t v = 0; v < width; ++v) {
            row[v] = std::log(mu_ * big[v] + (1.0 - mu_) * unigram_[v]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

MockModel train_mock(const std::filesystem::path& corpus_root, const TokenizerSpec& spec,
                     double mu, double kappa) {
    if (mu < 0.0 || mu > 1.0) {
        throw ParameterError(fmt::format("mu must lie in [0, 1], got {}", mu));
    }
    if (!(kappa > 0.0)) {
        throw ParameterError(fmt::format("kappa must be positive, got {}", kappa));
    }
    MockModel model;
    model.mu_ = mu;
    model.kappa_ = kappa;
    int64_t total_tokens = 0;
    walk_labeled_corpus(corpus_root, spec, model.vocab_,
                        [&](int, const std::string&, std::span<const TokenId> doc) {
                            TokenId prev = MockModel::kBeginContext;
                            for (TokenId id : doc) {
                                size_t v = static_cast<size_t>(id);
                                if (v >= model.unigram_counts_.size()) {
                                    model.unigram_counts_.resize(v + 1, 0);
                                }
                                ++model.unigram_counts_[v];
                                ++model.bigram_counts_[prev][id];
                                prev = id;
                                ++total_tokens;
                            }
                        });
    if (total_tokens == 0) {
        throw ConfigError(fmt::format("corpus '{}' contains no tokens", corpus_root.string()));
    }
    model.vocab_.set_special(SpecialRole::mask, model.vocab_.intern(kMaskToken));
    model.vocab_.set_special(SpecialRole::eos, model.vocab_.intern(kEosToken));
    model.vocab_.set_special(SpecialRole::pad, model.vocab_.intern(kPadToken));
    model.unigram_counts_.resize(static_cast<size_t>(model.vocab_.size()), 0);
    model.rebuild_probabilities();
    return model;
}

void save_mock(const MockModel& model, const std::filesystem::path& path) {
    tsv::Writer w(path);
    w.meta("kind", "mock-model");
    w.meta("mu", model.mu_);
    w.meta("kappa", model.kappa_);
    auto special_or_dash = [&](SpecialRole role) {
        auto id = model.vocab_.special(role);
        return id ? std::to_string(*id) : std::string("-");
    };
    w.meta("mask", special_or_dash(SpecialRole::mask));
    w.meta("eos", special_or_dash(SpecialRole::eos));
    w.meta("pad", special_or_dash(SpecialRole::pad));
    w.meta("vocab_sha", model.vocab_.fingerprint());
    for (TokenId id = 0; id < model.vocab_.size(); ++id) {
        std::vector<std::string> fields = {"V", std::to_string(id), model.vocab_.token(id)};
        w.row(fields);
    }
    for (size_t v = 0; v < model.unigram_counts_.size(); ++v) {
        if (model.unigram_counts_[v] == 0) continue;
        std::vector<std::string> fields = {"U", std::to_string(v),
                                           std::to_string(model.unigram_counts_[v])};
        w.row(fields);
    }
    for (const auto& [prev, row] : model.bigram_counts_) {
        for (const auto& [next, count] : row) {
            std::vector<std::string> fields = {"B", std::to_string(prev), std::to_string(next),
                                               std::to_string(count)};
            w.row(fields);
        }
    }
    w.close();
}

MockModel load_mock(const std::filesystem::path& path) {
    tsv::File f = tsv::read_file(path);
    if (tsv::require_meta(f, "kind", path) != "mock-model") {
        throw ParseError(fmt::format("{}: not a mock-model file", path.string()));
    }
    MockModel model;
    model.mu_ = tsv::parse_double(tsv::require_meta(f, "mu", path), path, 0);
    model.kappa_ = tsv::parse_double(tsv::require_meta(f, "kappa", path), path, 0);
    if (model.mu_ < 0.0 || model.mu_ > 1.0 || !(model.kappa_ > 0.0)) {
        throw ParseError(fmt::format("{}: mu/kappa out of range", path.string()));
    }

    // Vocab rows must come in dense id order.
    TokenId next_id = 0;
    for (const auto& row : f.rows) {
        if (row.fields.empty()) continue;
        const std::string& tag = row.fields[0];
        if (tag == "V") {
            if (row.fields.size() != 3) {
                throw ParseError(fmt::format("{}:{}: V row needs 3 fields", path.string(),
                                             row.line));
            }
            int64_t id = tsv::parse_int(row.fields[1], path, row.line);
            if (id != next_id) {
                throw ParseError(fmt::format("{}:{}: vocab ids must be dense; expected {} got {}",
                                             path.string(), row.line, next_id, id));
            }
            TokenId got = model.vocab_.intern(row.fields[2]);
            if (got != next_id) {
                throw ParseError(fmt::format("{}:{}: duplicate vocab token '{}'", path.string(),
                                             row.line, row.fields[2]));
            }
            ++next_id;
        }
    }
    auto parse_special = [&](const char* key, SpecialRole role) {
        const std::string& s = tsv::require_meta(f, key, path);
        if (s == "-") return;
        model.vocab_.set_special(role,
                                 static_cast<TokenId>(tsv::parse_int(s, path, 0)));
    };
    parse_special("mask", SpecialRole::mask);
    parse_special("eos", SpecialRole::eos);
    parse_special("pad", SpecialRole::pad);

    model.unigram_counts_.assign(static_cast<size_t>(model.vocab_.size()), 0);
    for (const auto& row : f.rows) {
        if (row.fields.empty()) continue;
        const std::string& tag = row.fields[0];
        if (tag == "U") {
            if (row.fields.size() != 3) {
                throw ParseError(fmt::format("{}:{}: U row needs 3 fields", path.string(),
                                             row.line));
            }
            int64_t id = tsv::parse_int(row.fields[1], path, row.line);
            if (id < 0 || id >= model.vocab_.size()) {
                throw ParseError(fmt::format("{}:{}: unigram id {} out of range", path.string(),
                                             row.line, id));
            }
            model.unigram_counts_[static_cast<size_t>(id)] =
                tsv::parse_int(row.fields[2], path, row.line);
        } else if (tag == "B") {
            if (row.fields.size() != 4) {
                throw ParseError(fmt::format("{}:{}: B row needs 4 fields", path.string(),
                                             row.line));
            }
            int64_t prev = tsv::parse_int(row.fields[1], path, row.line);
            int64_t next = tsv::parse_int(row.fields[2], path, row.line);
            if (prev < MockModel::kBeginContext || prev >= model.vocab_.size() || next < 0 ||
                next >= model.vocab_.size()) {
                throw ParseError(fmt::format("{}:{}: bigram ids out of range", path.string(),
                                             row.line));
            }
            model.bigram_counts_[static_cast<TokenId>(prev)][static_cast<TokenId>(next)] =
                tsv::parse_int(row.fields[3], path, row.line);
        } else if (tag != "V") {
            throw ParseError(fmt::format("{}:{}: unknown row tag '{}'", path.string(), row.line,
                                         tag));
        }
    }
    const std::string& sha = tsv::require_meta(f, "vocab_sha", path);
    if (sha != model.vocab_.fingerprint()) {
        throw ParseError(
            fmt::format("{}: vocab_sha does not match the stored vocabulary", path.string()));
    }
    model.rebuild_probabilities();
    return model;
}

}  // namespace lexsteer
