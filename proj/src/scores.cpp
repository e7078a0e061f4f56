#include "lexsteer/scores.hpp"

#include "lexsteer/errors.hpp"
#include "lexsteer/tsv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lexsteer {

namespace {

void check_class_index(const ClassCounts& counts, int k) {
    if (k < 0 || k >= counts.num_classes()) {
        throw ParameterError(
            fmt::format("class index {} out of range [0, {})", k, counts.num_classes()));
    }
    if (counts.num_classes() < 2) {
        throw ConfigError("a control task needs at least 2 classes");
    }
}

void check_prior_width(const ClassCounts& counts, const Prior& prior) {
    if (static_cast<int32_t>(prior.mass.size()) != counts.vocab_size()) {
        throw ShapeError(fmt::format("prior width {} does not match vocabulary size {}",
                                     prior.mass.size(), counts.vocab_size()));
    }
}

}  // namespace

Prior build_prior(std::span<const int64_t> pooled, double alpha) {
    if (!(alpha > 0.0)) {
        throw ParameterError(fmt::format("alpha must be positive, got {}", alpha));
    }
    int positive = 0;
    for (int64_t c : pooled) {
        if (c > 0) ++positive;
    }
    if (positive < 2) {
        throw ConfigError(fmt::format(
            "degenerate vocabulary: only {} token(s) with positive pooled count", positive));
    }
    Prior prior;
    prior.alpha = alpha;
    prior.mass.resize(pooled.size());
    double total = 0.0;
    for (size_t v = 0; v < pooled.size(); ++v) {
        prior.mass[v] = alpha * static_cast<double>(pooled[v]);
        total += prior.mass[v];
    }
    prior.total = total;
    return prior;
}

std::vector<double> log_odds(const ClassCounts& counts, int k, const Prior& prior) {
    check_class_index(counts, k);
    check_prior_width(counts, prior);
    const size_t width = prior.mass.size();
    const auto& ck = counts.counts[static_cast<size_t>(k)];
    const double nk = static_cast<double>(counts.totals[static_cast<size_t>(k)]);
    double n_rest = 0.0;
    for (int j = 0; j < counts.num_classes(); ++j) {
        if (j != k) n_rest += static_cast<double>(counts.totals[static_cast<size_t>(j)]);
    }
    std::vector<double> delta(width, 0.0);
    for (size_t v = 0; v < width; ++v) {
        int64_t pooled_v = 0;
        for (const auto& row : counts.counts) pooled_v += row[v];
        if (pooled_v == 0) continue;  // zero-signal rule
        const double a = prior.mass[v];
        const double c_in = static_cast<double>(ck[v]);
        const double c_rest = static_cast<double>(pooled_v - ck[v]);
        const double denom_in = nk + prior.total - c_in - a;
        const double denom_rest = n_rest + prior.total - c_rest - a;
        if (!(denom_in > 0.0) || !(denom_rest > 0.0)) {
            throw NumericalError(fmt::format(
                "log-odds denominator non-positive for token id {} in class '{}'", v,
                counts.class_names[static_cast<size_t>(k)]));
        }
        const double d = std::log(c_in + a) - std::log(denom_in) - std::log(c_rest + a) +
                         std::log(denom_rest);
        if (!std::isfinite(d)) {
            throw NumericalError(fmt::format(
                "log-odds not finite for token id {} in class '{}'", v,
                counts.class_names[static_cast<size_t>(k)]));
        }
        delta[v] = d;
    }
    return delta;
}

std::vector<double> log_odds_variance(const ClassCounts& counts, int k, const Prior& prior) {
    check_class_index(counts, k);
    check_prior_width(counts, prior);
    const size_t width = prior.mass.size();
    const auto& ck = counts.counts[static_cast<size_t>(k)];
    std::vector<double> var(width, 0.0);
    for (size_t v = 0; v < width; ++v) {
        int64_t pooled_v = 0;
        for (const auto& row : counts.counts) pooled_v += row[v];
        if (pooled_v == 0) continue;  // sentinel 0
        const double a = prior.mass[v];
        const double c_in = static_cast<double>(ck[v]);
        const double c_rest = static_cast<double>(pooled_v - ck[v]);
        if (c_in + a <= 0.0 || c_rest + a <= 0.0) {
            throw InternalError(fmt::format(
                "variance undefined for pooled-positive token id {} (zero count plus zero prior)",
                v));
        }
        var[v] = 1.0 / (c_in + a) + 1.0 / (c_rest + a);
    }
    return var;
}

std::vector<double> normalize_scores(std::span<const double> delta,
                                     std::span<const double> variance) {
    if (delta.size() != variance.size()) {
        throw ShapeError(fmt::format("delta width {} does not match variance width {}",
                                     delta.size(), variance.size()));
    }
    std::vector<double> z(delta.size(), 0.0);
    for (size_t v = 0; v < delta.size(); ++v) {
        if (variance[v] > 0.0) {
            z[v] = delta[v] / std::sqrt(variance[v]);
        } else if (delta[v] != 0.0) {
            throw ParameterError(
                fmt::format("token id {} has nonzero delta but no positive variance", v));
        }
    }
    return z;
}

std::vector<ScoreTable> build_score_tables(const Vocab& vocab, const ClassCounts& counts,
                                           double alpha,
                                           std::map<std::string, std::string> params) {
    if (counts.num_classes() < 2) {
        throw ConfigError("a control task needs at least 2 classes");
    }
    if (vocab.size() != counts.vocab_size()) {
        throw ShapeError(fmt::format("vocab size {} does not match count table width {}",
                                     vocab.size(), counts.vocab_size()));
    }
    for (int k = 0; k < counts.num_classes(); ++k) {
        if (counts.totals[static_cast<size_t>(k)] == 0) {
            throw ConfigError(fmt::format("class '{}' contains no tokens",
                                          counts.class_names[static_cast<size_t>(k)]));
        }
    }
    Prior prior = build_prior(pooled_counts(counts), alpha);

    ScoreTableMeta meta;
    meta.alpha = alpha;
    meta.vocab_sha = vocab.fingerprint();
    meta.num_classes = counts.num_classes();
    meta.class_names = counts.class_names;
    meta.params = std::move(params);

    std::vector<std::string> tokens;
    tokens.reserve(static_cast<size_t>(vocab.size()));
    for (TokenId id = 0; id < vocab.size(); ++id) tokens.push_back(vocab.token(id));

    std::vector<ScoreTable> tables;
    tables.reserve(static_cast<size_t>(counts.num_classes()));
    for (int k = 0; k < counts.num_classes(); ++k) {
        ScoreTable t;
        t.class_name = counts.class_names[static_cast<size_t>(k)];
        t.tokens = tokens;
        t.delta = log_odds(counts, k, prior);
        t.variance = log_odds_variance(counts, k, prior);
        t.zscore = normalize_scores(t.delta, t.variance);
        t.meta = meta;
        tables.push_back(std::move(t));
    }
    return tables;
}

void save_table(const ScoreTable& table, const std::filesystem::path& path) {
    const auto n = table.tokens.size();
    if (table.delta.size() != n || table.variance.size() != n || table.zscore.size() != n) {
        throw ShapeError("score table field widths disagree");
    }
    tsv::Writer w(path);
    w.meta("alpha", table.meta.alpha);
    w.meta("class", table.class_name);
    w.meta("classes", tsv::join(table.meta.class_names, ','));
    w.meta("k", static_cast<int64_t>(table.meta.num_classes));
    w.meta("vocab_sha", table.meta.vocab_sha);
    for (const auto& [key, value] : table.meta.params) {
        w.meta(fmt::format("meta.{}", key), value);
    }
    std::vector<TokenId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        double za = table.zscore[static_cast<size_t>(a)];
        double zb = table.zscore[static_cast<size_t>(b)];
        if (za != zb) return za > zb;
        return a < b;
    });
    for (TokenId id : order) {
        size_t v = static_cast<size_t>(id);
        std::vector<std::string> fields = {
            table.tokens[v], std::to_string(id),      tsv::format_double(table.delta[v]),
            tsv::format_double(table.variance[v]),    tsv::format_double(table.zscore[v]),
        };
        w.row(fields);
    }
    w.close();
}

ScoreTable load_table(const std::filesystem::path& path) {
    tsv::File f = tsv::read_file(path);
    ScoreTable t;
    t.meta.alpha = tsv::parse_double(tsv::require_meta(f, "alpha", path), path, 0);
    t.class_name = tsv::require_meta(f, "class", path);
    t.meta.class_names = tsv::split_on(tsv::require_meta(f, "classes", path), ',');
    t.meta.num_classes =
        static_cast<int32_t>(tsv::parse_int(tsv::require_meta(f, "k", path), path, 0));
    t.meta.vocab_sha = tsv::require_meta(f, "vocab_sha", path);
    for (const auto& [key, value] : f.meta) {
        if (key.rfind("meta.", 0) == 0) t.meta.params[key.substr(5)] = value;
    }
    if (t.meta.num_classes != static_cast<int32_t>(t.meta.class_names.size())) {
        throw ParseError(fmt::format("{}: k={} but classes lists {} names", path.string(),
                                     t.meta.num_classes, t.meta.class_names.size()));
    }
    if (std::find(t.meta.class_names.begin(), t.meta.class_names.end(), t.class_name) ==
        t.meta.class_names.end()) {
        throw ParseError(
            fmt::format("{}: class '{}' is not listed in classes", path.string(), t.class_name));
    }

    const size_t n = f.rows.size();
    t.tokens.assign(n, {});
    t.delta.assign(n, 0.0);
    t.variance.assign(n, 0.0);
    t.zscore.assign(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& row : f.rows) {
        if (row.fields.size() != 5) {
            throw ParseError(fmt::format("{}:{}: expected 5 tab-separated fields, got {}",
                                         path.string(), row.line, row.fields.size()));
        }
        int64_t id = tsv::parse_int(row.fields[1], path, row.line);
        if (id < 0 || static_cast<size_t>(id) >= n) {
            throw ParseError(fmt::format("{}:{}: token id {} outside dense range [0, {})",
                                         path.string(), row.line, id, n));
        }
        size_t v = static_cast<size_t>(id);
        if (seen[v]) {
            throw ParseError(
                fmt::format("{}:{}: duplicate token id {}", path.string(), row.line, id));
        }
        seen[v] = true;
        t.tokens[v] = row.fields[0];
        t.delta[v] = tsv::parse_double(row.fields[2], path, row.line);
        t.variance[v] = tsv::parse_double(row.fields[3], path, row.line);
        t.zscore[v] = tsv::parse_double(row.fields[4], path, row.line);
    }
    // Dense-range check above plus n rows implies all ids seen; keep the guard
    // for the empty-row corner.
    for (size_t v = 0; v < n; ++v) {
        if (!seen[v]) {
            throw ParseError(fmt::format("{}: token id {} missing from table", path.string(), v));
        }
    }
    return t;
}

}  // namespace lexsteer
