#include "lexsteer/analysis.hpp"

#include "lexsteer/errors.hpp"
#include "lexsteer/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace lexsteer;
using namespace lexsteer::testing;

namespace {

ScoreTable table_with_scores(std::vector<double> zscores, const std::string& name = "t",
                             const std::string& sha = "fixture") {
    ScoreTable t;
    t.class_name = name;
    t.meta.vocab_sha = sha;
    t.meta.num_classes = 2;
    t.meta.class_names = {"t", "u"};
    t.meta.alpha = 0.01;
    for (size_t v = 0; v < zscores.size(); ++v) {
        t.tokens.push_back("s" + std::to_string(v));
        t.delta.push_back(zscores[v]);
        t.variance.push_back(zscores[v] == 0.0 ? 0.0 : 1.0);
        t.zscore.push_back(zscores[v]);
    }
    return t;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("cue strength counts strictly-above thresholds") {
    auto t = table_with_scores({2.5, 3.5, 6.0, 0.0});
    auto report = cue_strength({t});
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].counts == std::vector<int64_t>{3, 2, 1});
    CHECK(report.rows[0].max_z == doctest::Approx(6.0));
}

TEST_CASE("cue strength of an all-zero table is zero") {
    auto t = table_with_scores({0.0, 0.0, 0.0});
    auto report = cue_strength({t});
    CHECK(report.rows[0].counts == std::vector<int64_t>{0, 0, 0});
    CHECK(report.rows[0].max_z == 0.0);
}

TEST_CASE("cue strength validates thresholds") {
    auto t = table_with_scores({1.0});
    CHECK_THROWS_AS(cue_strength({t}, {}), ParameterError);
    CHECK_THROWS_AS(cue_strength({t}, {3.0, 2.0}), ParameterError);
}

TEST_CASE("cue strength counts are non-increasing in the threshold") {
    RngStream rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores(12);
        for (double& s : scores) s = rng.next_uniform() * 12.0 - 3.0;
        auto report = cue_strength({table_with_scores(scores)});
        const auto& counts = report.rows[0].counts;
        for (size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] <= counts[i - 1]);
        for (size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > 0) CHECK(report.rows[0].max_z > report.thresholds[i]);
        }
    }
}

TEST_CASE("top tokens sort by zscore with lowest-id ties") {
    auto t = table_with_scores({2.5, 3.5, 6.0, 3.5});
    auto top1 = top_tokens(t, 1);
    REQUIRE(top1.size() == 1);
    CHECK(top1[0].token == "s2");
    auto all = top_tokens(t, 10);  // n beyond the vocab returns everything
    REQUIRE(all.size() == 4);
    CHECK(all[1].id == 1);  // 3.5 tie broken toward the lower id
    CHECK(all[2].id == 3);
    CHECK(all[3].id == 0);
    CHECK_THROWS_AS(top_tokens(t, 0), ParameterError);
}

TEST_CASE("jaccard identities") {
    auto t = table_with_scores({1.0, 2.0, 3.0, 4.0});
    CHECK(jaccard_overlap(t, t, 2) == 1.0);

    // Disjoint top-2 sets.
    auto a = table_with_scores({9.0, 8.0, 0.1, 0.2});
    auto b = table_with_scores({0.1, 0.2, 9.0, 8.0}, "u");
    CHECK(jaccard_overlap(a, b, 2) == 0.0);

    // Exactly one shared of top-2: intersection 1, union 3.
    auto c = table_with_scores({9.0, 8.0, 0.1, 0.0});
    auto d = table_with_scores({0.0, 8.0, 9.0, 0.1}, "u");
    CHECK(jaccard_overlap(c, d, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("jaccard is symmetric and bounded") {
    RngStream rng(67);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> sa(8), sb(8);
        for (double& s : sa) s = rng.next_uniform() * 10.0;
        for (double& s : sb) s = rng.next_uniform() * 10.0;
        auto a = table_with_scores(sa);
        auto b = table_with_scores(sb, "u");
        int32_t k = 1 + static_cast<int32_t>(rng.next_u64() % 8);
        double ab = jaccard_overlap(a, b, k);
        CHECK(ab == jaccard_overlap(b, a, k));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("jaccard refuses mismatched vocabulary fingerprints") {
    auto a = table_with_scores({1.0, 2.0});
    auto b = table_with_scores({1.0, 2.0}, "u", "other");
    CHECK_THROWS_AS(jaccard_overlap(a, b, 1), IncompatibilityError);
}

TEST_CASE("efficacy requires the zero control") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 6);
    MockModel model = train_mock(root, {});
    EfficacyConfig cfg;
    cfg.decode.block_len = 4;
    cfg.decode.num_steps = 4;
    cfg.decode.max_new_tokens = 4;
    cfg.num_sequences = 2;
    std::vector<double> grid = {0.25, 0.5};
    CHECK_THROWS_AS(steering_efficacy(root, "calm", grid, cfg, model), ParameterError);
}

TEST_CASE("efficacy lambda-zero row matches unsteered decodes bit for bit") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 10);
    MockModel model = train_mock(root, {});
    EfficacyConfig cfg;
    cfg.decode.block_len = 6;
    cfg.decode.num_steps = 6;
    cfg.decode.max_new_tokens = 6;
    cfg.decode.seed = 99;
    cfg.num_sequences = 5;
    std::vector<double> grid = {0.0, 0.5};
    auto report = steering_efficacy(root, "calm", grid, cfg, model);
    REQUIRE(report.rows.size() == 2);

    // Recompute the lambda = 0 row with plain unbiased decodes and the same
    // derived seeds.
    auto [vocab, counts] = load_labeled_corpus(root, {});
    auto tables = build_score_tables(vocab, counts, cfg.alpha);
    const ScoreTable* calm = nullptr;
    for (const auto& t : tables) {
        if (t.class_name == "calm") calm = &t;
    }
    REQUIRE(calm);
    auto pooled = pooled_counts(counts);
    size_t best = 0;
    for (size_t v = 1; v < pooled.size(); ++v) {
        if (pooled[v] > pooled[best]) best = v;
    }
    std::vector<TokenId> prompt = {*model.vocab().find(vocab.token(static_cast<TokenId>(best)))};
    double marker_sum = 0.0;
    for (int32_t i = 0; i < cfg.num_sequences; ++i) {
        DecodeConfig dc = cfg.decode;
        dc.seed = derive_seed(cfg.decode.seed, static_cast<uint64_t>(i));
        auto out = decode(prompt, model, nullptr, dc);
        int64_t markers = 0;
        for (TokenId id : out) {
            const std::string& tok = model.vocab().token(id);
            auto found = std::find(calm->tokens.begin(), calm->tokens.end(), tok);
            if (found != calm->tokens.end()) {
                size_t v = static_cast<size_t>(found - calm->tokens.begin());
                if (calm->zscore[v] > cfg.marker_threshold) ++markers;
            }
        }
        if (!out.empty()) {
            marker_sum += static_cast<double>(markers) / static_cast<double>(out.size());
        }
    }
    double expected = marker_sum / cfg.num_sequences;
    CHECK(report.rows[0].marker_rate == expected);
}

TEST_CASE("steering raises the marker rate on the synthetic corpus") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path());
    MockModel model = train_mock(root, {});
    EfficacyConfig cfg;
    cfg.decode.block_len = 12;
    cfg.decode.num_steps = 12;
    cfg.decode.max_new_tokens = 12;
    cfg.decode.seed = 5;
    cfg.num_sequences = 12;
    std::vector<double> grid = {0.0, 0.5};
    auto report = steering_efficacy(root, "calm", grid, cfg, model);
    CHECK(report.rows[1].marker_rate > report.rows[0].marker_rate);
}

TEST_CASE("identical classes leave the efficacy flat at zero markers") {
    TempDir tmp;
    write_file(tmp.path() / "corpus" / "one" / "d.txt", "x y z x\nz y x\n");
    write_file(tmp.path() / "corpus" / "two" / "d.txt", "x y z x\nz y x\n");
    auto root = tmp.path() / "corpus";
    MockModel model = train_mock(root, {});
    EfficacyConfig cfg;
    cfg.decode.block_len = 4;
    cfg.decode.num_steps = 4;
    cfg.decode.max_new_tokens = 4;
    cfg.num_sequences = 4;
    std::vector<double> grid = {0.0, 0.25, 0.5};
    auto report = steering_efficacy(root, "one", grid, cfg, model);
    for (const auto& row : report.rows) {
        CHECK(row.marker_rate == 0.0);  // all zscores are zero, nothing clears theta
    }
}

TEST_CASE("reports round-trip through their files") {
    TempDir tmp;

    CueStrengthReport cue;
    cue.thresholds = {2.0, 3.0, 5.0};
    cue.rows = {{"calm", {5, 3, 1}, 6.5}, {"vivid", {4, 2, 0}, 4.25}};
    save_cue_strength_report(cue, tmp.path() / "cue.tsv");
    auto cue2 = load_cue_strength_report(tmp.path() / "cue.tsv");
    CHECK(cue2.thresholds == cue.thresholds);
    REQUIRE(cue2.rows.size() == 2);
    CHECK(cue2.rows[0].class_name == "calm");
    CHECK(cue2.rows[0].counts == cue.rows[0].counts);
    CHECK(cue2.rows[1].max_z == cue.rows[1].max_z);

    TopTokensReport top;
    top.n = 2;
    top.entries = {{"calm", 1, "amber", 3.5}, {"calm", 2, "apple", 3.25}};
    save_top_tokens_report(top, tmp.path() / "top.tsv");
    auto top2 = load_top_tokens_report(tmp.path() / "top.tsv");
    CHECK(top2.n == 2);
    REQUIRE(top2.entries.size() == 2);
    CHECK(top2.entries[1].token == "apple");
    CHECK(top2.entries[1].zscore == 3.25);

    JaccardReport jac;
    jac.k_values = {2, 4};
    jac.entries = {{"calm", "vivid", 2, 0.0}, {"calm", "vivid", 4, 1.0 / 3.0}};
    save_jaccard_report(jac, tmp.path() / "jac.tsv");
    auto jac2 = load_jaccard_report(tmp.path() / "jac.tsv");
    CHECK(jac2.k_values == jac.k_values);
    REQUIRE(jac2.entries.size() == 2);
    CHECK(jac2.entries[1].jaccard == jac.entries[1].jaccard);

    EfficacyReport eff;
    eff.target_class = "calm";
    eff.marker_threshold = 2.0;
    eff.master_seed = 12345;
    eff.num_sequences = 50;
    eff.rows = {{0.0, 0.25, 0.5}, {0.5, 0.625, 0.875}};
    save_efficacy_report(eff, tmp.path() / "eff.tsv");
    auto eff2 = load_efficacy_report(tmp.path() / "eff.tsv");
    CHECK(eff2.target_class == "calm");
    CHECK(eff2.master_seed == 12345);
    CHECK(eff2.num_sequences == 50);
    REQUIRE(eff2.rows.size() == 2);
    CHECK(eff2.rows[1].lambda == eff.rows[1].lambda);
    CHECK(eff2.rows[1].marker_rate == eff.rows[1].marker_rate);
    CHECK(eff2.rows[1].target_rate == eff.rows[1].target_rate);
}

}  // TEST_SUITE
