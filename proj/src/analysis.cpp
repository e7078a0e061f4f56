#include "lexsteer/analysis.hpp"

#include "lexsteer/errors.hpp"
#include "lexsteer/rng.hpp"
#include "lexsteer/tsv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace lexsteer {

CueStrengthReport cue_strength(const std::vector<ScoreTable>& tables,
                               std::vector<double> thresholds) {
    if (thresholds.empty()) {
        throw ParameterError("cue_strength needs at least one threshold");
    }
    for (size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > thresholds[i - 1])) {
            throw ParameterError("thresholds must be strictly ascending");
        }
    }
    CueStrengthReport report;
    report.thresholds = std::move(thresholds);
    for (const auto& table : tables) {
        CueStrengthRow row;
        row.class_name = table.class_name;
        row.counts.assign(report.thresholds.size(), 0);
        double max_z = 0.0;
        bool first = true;
        for (double z : table.zscore) {
            if (first || z > max_z) max_z = z;
            first = false;
            for (size_t t = 0; t < report.thresholds.size(); ++t) {
                if (z > report.thresholds[t]) ++row.counts[t];
            }
        }
        row.max_z = first ? 0.0 : max_z;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<RankedToken> top_tokens(const ScoreTable& table, int32_t n) {
    if (n < 1) {
        throw ParameterError(fmt::format("top_tokens needs n >= 1, got {}", n));
    }
    std::vector<TokenId> order(table.tokens.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        double za = table.zscore[static_cast<size_t>(a)];
        double zb = table.zscore[static_cast<size_t>(b)];
        if (za != zb) return za > zb;
        return a < b;
    });
    size_t take = std::min<size_t>(static_cast<size_t>(n), order.size());
    std::vector<RankedToken> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) {
        TokenId id = order[i];
        out.push_back({id, table.tokens[static_cast<size_t>(id)],
                       table.zscore[static_cast<size_t>(id)]});
    }
    return out;
}

double jaccard_overlap(const ScoreTable& a, const ScoreTable& b, int32_t k) {
    if (k < 1) {
        throw ParameterError(fmt::format("jaccard_overlap needs k >= 1, got {}", k));
    }
    if (a.meta.vocab_sha != b.meta.vocab_sha) {
        throw IncompatibilityError(
            fmt::format("score tables '{}' and '{}' were built over different vocabularies",
                        a.class_name, b.class_name));
    }
    auto ids_of = [&](const ScoreTable& t) {
        std::unordered_set<TokenId> ids;
        for (const auto& rt : top_tokens(t, k)) ids.insert(rt.id);
        return ids;
    };
    auto sa = ids_of(a);
    auto sb = ids_of(b);
    size_t intersection = 0;
    for (TokenId id : sa) {
        if (sb.count(id)) ++intersection;
    }
    size_t uni = sa.size() + sb.size() - intersection;
    if (uni == 0) return 1.0;  // both sets empty only when |V| == 0
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

TopTokensReport build_top_tokens_report(const std::vector<ScoreTable>& tables, int32_t n) {
    TopTokensReport report;
    report.n = n;
    for (const auto& table : tables) {
        auto ranked = top_tokens(table, n);
        for (size_t i = 0; i < ranked.size(); ++i) {
            report.entries.push_back({table.class_name, static_cast<int32_t>(i + 1),
                                      ranked[i].token, ranked[i].zscore});
        }
    }
    return report;
}

JaccardReport build_jaccard_report(const std::vector<ScoreTable>& tables,
                                   std::span<const int32_t> k_values) {
    if (k_values.empty()) {
        throw ParameterError("jaccard report needs at least one k value");
    }
    JaccardReport report;
    report.k_values.assign(k_values.begin(), k_values.end());
    for (size_t i = 0; i < tables.size(); ++i) {
        for (size_t j = i + 1; j < tables.size(); ++j) {
            for (int32_t k : k_values) {
                report.entries.push_back({tables[i].class_name, tables[j].class_name, k,
                                          jaccard_overlap(tables[i], tables[j], k)});
            }
        }
    }
    return report;
}

EfficacyReport steering_efficacy(const std::filesystem::path& corpus_root,
                                 const std::string& target_class,
                                 std::span<const double> lambda_grid,
                                 const EfficacyConfig& config, MockModel& model) {
    if (std::find(lambda_grid.begin(), lambda_grid.end(), 0.0) == lambda_grid.end()) {
        throw ParameterError("lambda grid must contain 0 (the unsteered control)");
    }
    if (config.num_sequences < 1) {
        throw ParameterError("num_sequences must be >= 1");
    }
    auto [vocab, counts] = load_labeled_corpus(corpus_root, config.tokenizer);
    auto tables = build_score_tables(vocab, counts, config.alpha);
    int target_index = -1;
    for (size_t k = 0; k < tables.size(); ++k) {
        if (tables[k].class_name == target_class) target_index = static_cast<int>(k);
    }
    if (target_index < 0) {
        throw ConfigError(fmt::format("class '{}' not found in corpus '{}'", target_class,
                                      corpus_root.string()));
    }

    // zscore lookup per class keyed by token string so any provider vocab maps.
    std::vector<std::unordered_map<std::string, double>> class_scores(tables.size());
    for (size_t k = 0; k < tables.size(); ++k) {
        for (size_t v = 0; v < tables[k].tokens.size(); ++v) {
            class_scores[k][tables[k].tokens[v]] = tables[k].zscore[v];
        }
    }

    std::vector<TokenId> prompt = config.prompt;
    if (prompt.empty()) {
        auto pooled = pooled_counts(counts);
        size_t best = 0;
        for (size_t v = 1; v < pooled.size(); ++v) {
            if (pooled[v] > pooled[best]) best = v;
        }
        auto id = model.vocab().find(vocab.token(static_cast<TokenId>(best)));
        if (!id) {
            throw IncompatibilityError(
                "mock model vocabulary does not contain the corpus's most frequent token; "
                "train the model on the same corpus");
        }
        prompt.push_back(*id);
    }

    EfficacyReport report;
    report.target_class = target_class;
    report.marker_threshold = config.marker_threshold;
    report.master_seed = config.decode.seed;
    report.num_sequences = config.num_sequences;

    const auto& target_scores = class_scores[static_cast<size_t>(target_index)];
    for (double lambda : lambda_grid) {
        BiasVector bias =
            build_bias(tables[static_cast<size_t>(target_index)], lambda, config.decode.tau,
                       model.vocab());
        double marker_sum = 0.0;
        int32_t target_hits = 0;
        for (int32_t i = 0; i < config.num_sequences; ++i) {
            DecodeConfig dc = config.decode;
            dc.lambda = lambda;
            dc.seed = derive_seed(config.decode.seed, static_cast<uint64_t>(i));
            std::vector<TokenId> out = decode(prompt, model, &bias, dc);
            int64_t markers = 0;
            std::vector<double> bag(tables.size(), 0.0);
            for (TokenId id : out) {
                const std::string& tok = model.vocab().token(id);
                auto it = target_scores.find(tok);
                if (it != target_scores.end() && it->second > config.marker_threshold) {
                    ++markers;
                }
                for (size_t k = 0; k < class_scores.size(); ++k) {
                    auto jt = class_scores[k].find(tok);
                    if (jt != class_scores[k].end()) bag[k] += jt->second;
                }
            }
            if (!out.empty()) {
                marker_sum += static_cast<double>(markers) / static_cast<double>(out.size());
            }
            size_t best_class = 0;
            for (size_t k = 1; k < bag.size(); ++k) {
                if (bag[k] > bag[best_class]) best_class = k;
            }
            if (static_cast<int>(best_class) == target_index) ++target_hits;
        }
        EfficacyRow row;
        row.lambda = lambda;
        row.marker_rate = marker_sum / static_cast<double>(config.num_sequences);
        row.target_rate =
            static_cast<double>(target_hits) / static_cast<double>(config.num_sequences);
        report.rows.push_back(row);
    }
    return report;
}

// --- Report persistence ------------------------------------------------------

void save_cue_strength_report(const CueStrengthReport& report,
                              const std::filesystem::path& path) {
    tsv::Writer w(path);
    w.meta("report", "cue-strength");
    std::vector<std::string> th;
    for (double t : report.thresholds) th.push_back(tsv::format_double(t));
    w.meta("thresholds", tsv::join(th, ','));
    w.comment("class\tcount per threshold...\tmax_z");
    for (const auto& row : report.rows) {
        std::vector<std::string> fields = {row.class_name};
        for (int64_t c : row.counts) fields.push_back(std::to_string(c));
        fields.push_back(tsv::format_double(row.max_z));
        w.row(fields);
    }
    w.close();
}

CueStrengthReport load_cue_strength_report(const std::filesystem::path& path) {
    tsv::File f = tsv::read_file(path);
    if (tsv::require_meta(f, "report", path) != "cue-strength") {
        throw ParseError(fmt::format("{}: not a cue-strength report", path.string()));
    }
    CueStrengthReport report;
    for (const auto& t : tsv::split_on(tsv::require_meta(f, "thresholds", path), ',')) {
        report.thresholds.push_back(tsv::parse_double(t, path, 0));
    }
    for (const auto& row : f.rows) {
        if (row.fields.size() != report.thresholds.size() + 2) {
            throw ParseError(fmt::format("{}:{}: expected {} fields", path.string(), row.line,
                                         report.thresholds.size() + 2));
        }
        CueStrengthRow r;
        r.class_name = row.fields[0];
        for (size_t t = 0; t < report.thresholds.size(); ++t) {
            r.counts.push_back(tsv::parse_int(row.fields[t + 1], path, row.line));
        }
        r.max_z = tsv::parse_double(row.fields.back(), path, row.line);
        report.rows.push_back(std::move(r));
    }
    return report;
}

void save_top_tokens_report(const TopTokensReport& report, const std::filesystem::path& path) {
    tsv::Writer w(path);
    w.meta("report", "top-tokens");
    w.meta("n", static_cast<int64_t>(report.n));
    w.comment("class\trank\ttoken\tzscore");
    for (const auto& e : report.entries) {
        std::vector<std::string> fields = {e.class_name, std::to_string(e.rank), e.token,
                                           tsv::format_double(e.zscore)};
        w.row(fields);
    }
    w.close();
}

TopTokensReport load_top_tokens_report(const std::filesystem::path& path) {
    tsv::File f = tsv::read_file(path);
    if (tsv::require_meta(f, "report", path) != "top-tokens") {
        throw ParseError(fmt::format("{}: not a top-tokens report", path.string()));
    }
    TopTokensReport report;
    report.n = static_cast<int32_t>(tsv::parse_int(tsv::require_meta(f, "n", path), path, 0));
    for (const auto& row : f.rows) {
        if (row.fields.size() != 4) {
            throw ParseError(fmt::format("{}:{}: expected 4 fields", path.string(), row.line));
        }
        report.entries.push_back(
            {row.fields[0], static_cast<int32_t>(tsv::parse_int(row.fields[1], path, row.line)),
             row.fields[2], tsv::parse_double(row.fields[3], path, row.line)});
    }
    return report;
}

void save_jaccard_report(const JaccardReport& report, const std::filesystem::path& path) {
    tsv::Writer w(path);
    w.meta("report", "jaccard");
    std::vector<std::string> ks;
    for (int32_t k : report.k_values) ks.push_back(std::to_string(k));
    w.meta("k_values", tsv::join(ks, ','));
    w.comment("class_a\tclass_b\tk\tjaccard");
    for (const auto& e : report.entries) {
        std::vector<std::string> fields = {e.class_a, e.class_b, std::to_string(e.k),
                                           tsv::format_double(e.jaccard)};
        w.row(fields);
    }
    w.close();
}

JaccardReport load_jaccard_report(const std::filesystem::path& path) {
    tsv::File f = tsv::read_file(path);
    if (tsv::require_meta(f, "report", path) != "jaccard") {
        throw ParseError(fmt::format("{}: not a jaccard report", path.string()));
    }
    JaccardReport report;
    for (const auto& k : tsv::split_on(tsv::require_meta(f, "k_values", path), ',')) {
        report.k_values.push_back(static_cast<int32_t>(tsv::parse_int(k, path, 0)));
    }
    for (const auto& row : f.rows) {
        if (row.fields.size() != 4) {
            throw ParseError(fmt::format("{}:{}: expected 4 fields", path.string(), row.line));
        }
        report.entries.push_back(
            {row.fields[0], row.fields[1],
             static_cast<int32_t>(tsv::parse_int(row.fields[2], path, row.line)),
             tsv::parse_double(row.fields[3], path, row.line)});
    }
    return report;
}

void save_efficacy_report(const EfficacyReport& report, const std::filesystem::path& path) {
    tsv::Writer w(path);
    w.meta("report", "steering-efficacy");
    w.meta("class", report.target_class);
    w.meta("theta", report.marker_threshold);
    w.meta("master_seed", static_cast<int64_t>(report.master_seed));
    w.meta("num_sequences", static_cast<int64_t>(report.num_sequences));
    std::vector<std::string> grid;
    for (const auto& row : report.rows) grid.push_back(tsv::format_double(row.lambda));
    w.meta("lambda_grid", tsv::join(grid, ','));
    w.comment("lambda\tmarker_rate\ttarget_rate");
    for (const auto& row : report.rows) {
        std::vector<std::string> fields = {tsv::format_double(row.lambda),
                                           tsv::format_double(row.marker_rate),
                                           tsv::format_double(row.target_rate)};
        w.row(fields);
    }
    w.close();
}

EfficacyReport load_efficacy_report(const std::filesystem::path& path) {
    tsv::File f = tsv::read_file(path);
    if (tsv::require_meta(f, "report", path) != "steering-efficacy") {
        throw ParseError(fmt::format("{}: not a steering-efficacy report", path.string()));
    }
    EfficacyReport report;
    report.target_class = tsv::require_meta(f, "class", path);
    report.marker_threshold = tsv::parse_double(tsv::require_meta(f, "theta", path), path, 0);
    report.master_seed =
        static_cast<uint64_t>(tsv::parse_int(tsv::require_meta(f, "master_seed", path), path, 0));
    report.num_sequences = static_cast<int32_t>(
        tsv::parse_int(tsv::require_meta(f, "num_sequences", path), path, 0));
    for (const auto& row : f.rows) {
        if (row.fields.size() != 3) {
            throw ParseError(fmt::format("{}:{}: expected 3 fields", path.string(), row.line));
        }
        report.rows.push_back({tsv::parse_double(row.fields[0], path, row.line),
                               tsv::parse_double(row.fields[1], path, row.line),
                               tsv::parse_double(row.fields[2], path, row.line)});
    }
    return report;
}

}  // namespace lexsteer
