#include "lexsteer/analysis.hpp"
#include "lexsteer/scores.hpp"
#include "lexsteer/tsv.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <string>

using namespace lexsteer;
using namespace lexsteer::testing;

#ifndef LEXSTEER_CLI_PATH
#error "LEXSTEER_CLI_PATH must be defined by the build"
#endif

namespace {

const std::string kCli = LEXSTEER_CLI_PATH;

std::string q(const fs::path& p) {
    return "'" + p.string() + "'";
}

// Payload lines of an output file: everything that is not metadata/comment.
std::vector<std::string> payload_lines(const fs::path& p) {
    std::vector<std::string> out;
    for (const auto& line : tsv::split_on(read_file(p), '\n')) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("build-scores output matches the library oracle") {
    TempDir tmp;
    auto root = make_two_class_fixture(tmp.path());
    auto out_dir = tmp.path() / "out";
    auto r = run_cmd(kCli + " build-scores --corpus " + q(root) + " --out-dir " + q(out_dir));
    CHECK(r.status == 0);

    auto table = load_table(out_dir / "scores_one.tsv");
    auto oracle = oracle_scores({{2, 1}, {1, 2}}, 0, 0.01);
    REQUIRE(table.tokens.size() == 2);
    for (size_t v = 0; v < 2; ++v) {
        CHECK(close_rel(table.delta[v], oracle.delta[v], 1e-9));
        CHECK(close_rel(table.zscore[v], oracle.zscore[v], 1e-9));
    }
    CHECK(fs::exists(out_dir / "scores_two.tsv"));
    CHECK(fs::exists(out_dir / "counts.tsv"));
}

TEST_CASE("a missing corpus root fails with a diagnostic naming the path") {
    TempDir tmp;
    auto r = run_cmd(kCli + " build-scores --corpus " + q(tmp.path() / "nope") +
                     " --out-dir " + q(tmp.path() / "out"));
    CHECK(r.status != 0);
    CHECK(r.output.find("nope") != std::string::npos);
}

TEST_CASE("help lists the published defaults") {
    auto bs = run_cmd(kCli + " build-scores --help");
    CHECK(bs.status == 0);
    CHECK(bs.output.find("--alpha") != std::string::npos);
    CHECK(bs.output.find("0.01") != std::string::npos);

    auto dec = run_cmd(kCli + " decode --help");
    CHECK(dec.status == 0);
    CHECK(dec.output.find("--tau") != std::string::npos);
    CHECK(dec.output.find("8") != std::string::npos);
    CHECK(dec.output.find("--steps") != std::string::npos);
    CHECK(dec.output.find("128") != std::string::npos);
    CHECK(dec.output.find("0.7") != std::string::npos);   // llada profile strength
    CHECK(dec.output.find("0.5") != std::string::npos);   // dream profile strength

    for (const char* sub : {"mock-train", "analyze", "sweep"}) {
        auto r = run_cmd(kCli + " " + sub + " --help");
        CHECK(r.status == 0);
    }
}

TEST_CASE("decode is idempotent and lambda 0 matches no table") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 10);
    auto out_dir = tmp.path() / "scores";
    REQUIRE(run_cmd(kCli + " build-scores --corpus " + q(root) + " --out-dir " + q(out_dir))
                .status == 0);
    auto model = tmp.path() / "mock.tsv";
    REQUIRE(run_cmd(kCli + " mock-train --corpus " + q(root) + " --out " + q(model)).status == 0);
    write_file(tmp.path() / "prompt.txt", "the\n");

    std::string common = " decode --mock-model " + q(model) + " --prompt-file " +
                         q(tmp.path() / "prompt.txt") +
                         " --block-len 8 --steps 8 --max-new-tokens 8 --seed 3 --out ";
    auto a = tmp.path() / "a.txt";
    auto b = tmp.path() / "b.txt";
    auto c = tmp.path() / "c.txt";
    auto d = tmp.path() / "d.txt";
    REQUIRE(run_cmd(kCli + common + q(a)).status == 0);
    REQUIRE(run_cmd(kCli + common + q(b)).status == 0);
    CHECK(read_file(a) == read_file(b));  // byte-identical reruns

    std::string table = " --table " + q(out_dir / "scores_calm.tsv");
    REQUIRE(run_cmd(kCli + common + q(c) + table + " --lambda 0").status == 0);
    REQUIRE(run_cmd(kCli + common + q(d)).status == 0);
    CHECK(payload_lines(c) == payload_lines(d));  // neutrality of lambda = 0

    // And steering with the default lambda changes the text.
    auto e = tmp.path() / "e.txt";
    REQUIRE(run_cmd(kCli + common + q(e) + table).status == 0);
    CHECK(payload_lines(e) != payload_lines(d));
}

TEST_CASE("decode writes a trajectory log with one record per step") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 6);
    auto model = tmp.path() / "mock.tsv";
    REQUIRE(run_cmd(kCli + " mock-train --corpus " + q(root) + " --out " + q(model)).status == 0);
    write_file(tmp.path() / "prompt.txt", "the\n");
    auto out = tmp.path() / "gen.txt";
    auto traj = tmp.path() / "traj.jsonl";
    REQUIRE(run_cmd(kCli + " decode --mock-model " + q(model) + " --prompt-file " +
                    q(tmp.path() / "prompt.txt") + " --out " + q(out) + " --trajectory " +
                    q(traj) + " --block-len 5 --steps 5 --max-new-tokens 5 --greedy")
                .status == 0);
    auto lines = payload_lines(traj);
    CHECK(lines.size() == 5);
    CHECK(lines[0].find("\"step\":0") != std::string::npos);
    CHECK(lines[0].find("\"gamma\"") != std::string::npos);
}

TEST_CASE("decode works against an external provider via --provider-cmd") {
    TempDir tmp;
    auto out = tmp.path() / "gen.txt";
    auto out2 = tmp.path() / "gen2.txt";
    std::string common = kCli + " decode --provider-cmd '" + std::string(ECHO_PROVIDER_PATH) +
                         "' --prompt-ids '0 1' --block-len 4 --steps 4 --max-new-tokens 4" +
                         " --greedy --emit-ids --out ";
    REQUIRE(run_cmd(common + q(out)).status == 0);
    REQUIRE(run_cmd(common + q(out2)).status == 0);
    CHECK(read_file(out) == read_file(out2));  // deterministic through the adapter
    CHECK(read_file(out).find("#! cfg.") != std::string::npos);
}

TEST_CASE("config files round-trip losslessly") {
    TempDir tmp;
    auto root = make_two_class_fixture(tmp.path());
    auto f1 = tmp.path() / "cfg1.txt";
    auto f2 = tmp.path() / "cfg2.txt";
    REQUIRE(run_cmd(kCli + " build-scores --corpus " + q(root) + " --out-dir " +
                    q(tmp.path() / "o1") + " --alpha 0.05 --dump-config " + q(f1))
                .status == 0);
    REQUIRE(run_cmd(kCli + " build-scores --config " + q(f1) + " --out-dir " +
                    q(tmp.path() / "o2") + " --dump-config " + q(f2))
                .status == 0);
    // The re-run used the dumped alpha/corpus; out-dir was overridden by flag.
    auto cfg1 = read_file(f1);
    auto cfg2 = read_file(f2);
    auto strip_outdir = [](std::string text) {
        std::string out;
        for (const auto& line : tsv::split_on(text, '\n')) {
            if (line.rfind("out-dir=", 0) == 0 || line.empty()) continue;
            out += line + "\n";
        }
        return out;
    };
    CHECK(strip_outdir(cfg1) == strip_outdir(cfg2));
    CHECK(cfg1.find("alpha=0.05") != std::string::npos);
    // Flags beat the config file.
    CHECK(fs::exists(tmp.path() / "o2" / "counts.tsv"));
}

TEST_CASE("analyze emits the three report files") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 10);
    auto scores = tmp.path() / "scores";
    REQUIRE(run_cmd(kCli + " build-scores --corpus " + q(root) + " --out-dir " + q(scores))
                .status == 0);
    auto reports = tmp.path() / "reports";
    auto r = run_cmd(kCli + " analyze --tables " + q(scores / "scores_calm.tsv") + "," +
                     q(scores / "scores_vivid.tsv") + " --out-dir " + q(reports) +
                     " --k-values 4,8 --top-n 3");
    CHECK(r.status == 0);
    auto cue = load_cue_strength_report(reports / "cue_strength.tsv");
    CHECK(cue.rows.size() == 2);
    auto top = load_top_tokens_report(reports / "top_tokens.tsv");
    CHECK(top.entries.size() == 6);  // 3 per class
    auto jac = load_jaccard_report(reports / "jaccard.tsv");
    CHECK(jac.entries.size() == 2);  // one pair, two k values
    for (const auto& e : jac.entries) CHECK(e.jaccard == 0.0);  // disjoint markers
}

TEST_CASE("sweep writes one row per grid cell and stays monotone in lambda") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path());
    auto out = tmp.path() / "sweep.tsv";
    auto r = run_cmd(kCli + " sweep --corpus " + q(root) + " --class calm --out " + q(out) +
                     " --lambda-grid 0,0.25,0.5 --seeds 8 --block-len 10 --steps 10" +
                     " --max-new-tokens 10 --jobs 2");
    CHECK(r.status == 0);
    auto rows = payload_lines(out);
    REQUIRE(rows.size() == 3);
    std::vector<double> marker_rates;
    for (const auto& row : rows) {
        auto fields = tsv::split_tabs(row);
        REQUIRE(fields.size() == 5);
        marker_rates.push_back(std::stod(fields[3]));
    }
    CHECK(marker_rates[2] > marker_rates[0]);
    CHECK(marker_rates[1] >= marker_rates[0]);
    CHECK(marker_rates[2] >= marker_rates[1]);
}

TEST_CASE("sweep without the zero control is rejected") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 4);
    auto r = run_cmd(kCli + " sweep --corpus " + q(root) + " --class calm --out " +
                     q(tmp.path() / "s.tsv") + " --lambda-grid 0.25,0.5 --seeds 1" +
                     " --block-len 4 --steps 4 --max-new-tokens 4");
    CHECK(r.status != 0);
    CHECK(r.output.find("lambda grid") != std::string::npos);
}

TEST_CASE("a tau sweep writes one row per tau with metadata populated") {
    TempDir tmp;
    auto root = write_synthetic_two_class_corpus(tmp.path(), 8);
    auto out = tmp.path() / "sweep.tsv";
    auto r = run_cmd(kCli + " sweep --corpus " + q(root) + " --class calm --out " + q(out) +
                     " --lambda-grid 0,0.5 --tau-grid 2,8 --seeds 2 --block-len 4" +
                     " --steps 4 --max-new-tokens 4");
    CHECK(r.status == 0);
    auto text = read_file(out);
    CHECK(text.find("#! cfg.tau-grid=2,8") != std::string::npos);
    CHECK(payload_lines(out).size() == 4);  // 2 taus x 2 lambdas
}

}  // TEST_SUITE
