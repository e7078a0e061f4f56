// lexsteer: build per-class token score tables from labeled corpora and steer
// a block-wise masked-diffusion decoder with a clipped, scaled score bias.

#include "lexsteer/analysis.hpp"
#include "lexsteer/corpus.hpp"
#include "lexsteer/decoder.hpp"
#include "lexsteer/errors.hpp"
#include "lexsteer/mock_model.hpp"
#include "lexsteer/rng.hpp"
#include "lexsteer/scores.hpp"
#include "lexsteer/steering.hpp"
#include "lexsteer/subprocess_provider.hpp"
#include "lexsteer/tokenizer.hpp"
#include "lexsteer/tsv.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace lexsteer;

namespace {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

void dump_config(const ConfigEcho& kv, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

std::map<std::string, std::string> echo_meta(const ConfigEcho& kv) {
    std::map<std::string, std::string> meta;
    for (const auto& [k, v] : kv) meta.emplace("cfg." + k, v);
    return meta;
}

void write_echo(tsv::Writer& w, const ConfigEcho& kv) {
    for (const auto& [k, v] : kv) w.meta("cfg." + k, v);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

std::vector<TokenId> parse_id_list(const std::string& text) {
    std::vector<TokenId> ids;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) break;
        int32_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + i, v);
        if (ec != std::errc{} || ptr != text.data() + i || v < 0) {
            throw ParameterError(
                fmt::format("'{}' is not a non-negative token id", text.substr(start, i - start)));
        }
        ids.push_back(v);
    }
    return ids;
}

std::string join_doubles(std::span<const double> values) {
    std::vector<std::string> parts;
    for (double v : values) parts.push_back(tsv::format_double(v));
    return tsv::join(parts, ',');
}

double profile_lambda(const std::string& profile) {
    return profile == "dream" ? kDefaultLambdaDream : kDefaultLambdaLlada;
}

// --- shared option bundles ---------------------------------------------------

struct TokenizerOpts {
    std::string kind = "whitespace-punct";
    std::string normalization = "lowercase";

    TokenizerSpec spec() const {
        return {tokenizer_kind_from_string(kind), normalization_from_string(normalization)};
    }
    void add_flags(CLI::App* sub) {
        sub->add_option("--tokenizer", kind,
                        "Tokenizer kind: whitespace-punct or external-id-stream")
            ->capture_default_str()
            ->check(CLI::IsMember({"whitespace-punct", "external-id-stream"}));
        sub->add_option("--normalization", normalization,
                        "Token normalization: lowercase or none")
            ->capture_default_str()
            ->check(CLI::IsMember({"lowercase", "none"}));
    }
    void echo(ConfigEcho& kv) const {
        kv.emplace_back("tokenizer", kind);
        kv.emplace_back("normalization", normalization);
    }
};

// --- build-scores ------------------------------------------------------------

struct BuildScoresOpts {
    std::string corpus;
    std::string out_dir;
    double alpha = kDefaultAlpha;
    TokenizerOpts tok;
    std::string dump_config_path;
};

void run_build_scores(const BuildScoresOpts& opt) {
    ConfigEcho kv;
    kv.emplace_back("corpus", opt.corpus);
    kv.emplace_back("out-dir", opt.out_dir);
    kv.emplace_back("alpha", tsv::format_double(opt.alpha));
    opt.tok.echo(kv);
    if (!opt.dump_config_path.empty()) dump_config(kv, opt.dump_config_path);

    TokenizerSpec spec = opt.tok.spec();
    auto [vocab, counts] = load_labeled_corpus(opt.corpus, spec);
    std::map<std::string, std::string> params = {
        {"tokenizer", to_string(spec.kind)},
        {"normalization", to_string(spec.normalization)},
    };
    auto tables = build_score_tables(vocab, counts, opt.alpha, params);

    fs::create_directories(opt.out_dir);
    save_count_table(vocab, counts, fs::path(opt.out_dir) / "counts.tsv", echo_meta(kv));
    for (const auto& table : tables) {
        save_table(table, fs::path(opt.out_dir) / fmt::format("scores_{}.tsv", table.class_name));
    }
    fmt::print("wrote {} score tables and counts.tsv to {}\n", tables.size(), opt.out_dir);
}

// --- mock-train ---------------------------------------------------------------

struct MockTrainOpts {
    std::string corpus;
    std::string out;
    double mu = kDefaultMu;
    double kappa = kDefaultKappa;
    TokenizerOpts tok;
    std::string dump_config_path;
};

void run_mock_train(const MockTrainOpts& opt) {
    ConfigEcho kv;
    kv.emplace_back("corpus", opt.corpus);
    kv.emplace_back("out", opt.out);
    kv.emplace_back("mu", tsv::format_double(opt.mu));
    kv.emplace_back("kappa", tsv::format_double(opt.kappa));
    opt.tok.echo(kv);
    if (!opt.dump_config_path.empty()) dump_config(kv, opt.dump_config_path);

    MockModel model = train_mock(opt.corpus, opt.tok.spec(), opt.mu, opt.kappa);
    save_mock(model, opt.out);
    fmt::print("trained mock model over {} tokens -> {}\n", model.vocab().size(), opt.out);
}

// --- decode --------------------------------------------------------------------

struct DecodeOpts {
    std::string table_path;
    std::string mock_model_path;
    std::string provider_cmd;
    std::string prompt_file;
    std::string prompt_ids;
    std::string out;
    std::string trajectory_path;
    std::string profile = "llada";
    double lambda = -1.0;  // resolved from profile when the flag is absent
    bool lambda_given = false;
    double tau = kDefaultTau;
    double temperature = 1.0;
    bool greedy = false;
    bool emit_ids = false;
    uint64_t seed = 0;
    int32_t block_len = kDefaultBlockLen;
    int32_t num_steps = kDefaultNumSteps;
    int32_t max_new_tokens = kDefaultBlockLen;
    TokenizerOpts tok;
    std::string dump_config_path;
};

void run_decode(DecodeOpts& opt) {
    if (!opt.lambda_given) opt.lambda = profile_lambda(opt.profile);
    if (opt.mock_model_path.empty() == opt.provider_cmd.empty()) {
        throw ParameterError("exactly one of --mock-model and --provider-cmd is required");
    }
    if (opt.prompt_file.empty() == opt.prompt_ids.empty()) {
        throw ParameterError("exactly one of --prompt-file and --prompt-ids is required");
    }

    ConfigEcho kv;
    kv.emplace_back("table", opt.table_path);
    kv.emplace_back("profile", opt.profile);
    kv.emplace_back("lambda", tsv::format_double(opt.lambda));
    kv.emplace_back("tau", tsv::format_double(opt.tau));
    kv.emplace_back("temperature", tsv::format_double(opt.temperature));
    kv.emplace_back("greedy", opt.greedy ? "true" : "false");
    kv.emplace_back("seed", std::to_string(opt.seed));
    kv.emplace_back("block-len", std::to_string(opt.block_len));
    kv.emplace_back("steps", std::to_string(opt.num_steps));
    kv.emplace_back("max-new-tokens", std::to_string(opt.max_new_tokens));
    opt.tok.echo(kv);
    if (!opt.dump_config_path.empty()) dump_config(kv, opt.dump_config_path);

    std::unique_ptr<LogitProvider> provider;
    MockModel mock;
    if (!opt.mock_model_path.empty()) {
        mock = load_mock(opt.mock_model_path);
        provider = nullptr;  // mock lives on the stack; see below
    } else {
        provider = std::make_unique<SubprocessProvider>(opt.provider_cmd);
    }
    LogitProvider& prov = provider ? *provider : static_cast<LogitProvider&>(mock);

    std::vector<TokenId> prompt;
    if (!opt.prompt_ids.empty()) {
        prompt = parse_id_list(opt.prompt_ids);
        for (TokenId id : prompt) {
            if (id >= prov.vocab().size()) {
                throw ParameterError(fmt::format(
                    "prompt id {} outside provider vocabulary of size {}", id,
                    prov.vocab().size()));
            }
        }
    } else {
        prompt = tokenize_lookup(read_text_file(opt.prompt_file), opt.tok.spec(), prov.vocab());
    }

    DecodeConfig cfg;
    cfg.block_len = opt.block_len;
    cfg.num_steps = opt.num_steps;
    cfg.max_new_tokens = opt.max_new_tokens;
    cfg.temperature = opt.temperature;
    cfg.greedy = opt.greedy;
    cfg.seed = opt.seed;
    cfg.lambda = opt.lambda;
    cfg.tau = opt.tau;
    cfg.profile = opt.profile;

    std::optional<BiasVector> bias;
    if (!opt.table_path.empty()) {
        ScoreTable table = load_table(opt.table_path);
        bias = build_bias(table, opt.lambda, opt.tau, prov.vocab());
    }

    std::ofstream traj;
    StepCallback on_step;
    if (!opt.trajectory_path.empty()) {
        traj.open(opt.trajectory_path);
        if (!traj) {
            throw ConfigError(fmt::format("cannot write '{}'", opt.trajectory_path));
        }
        on_step = [&traj](const StepRecord& rec) {
            nlohmann::json commits = nlohmann::json::array();
            for (const auto& c : rec.commits) {
                commits.push_back(
                    {{"pos", c.position}, {"token", c.token}, {"gamma", c.confidence}});
            }
            nlohmann::json line = {
                {"block", rec.block_index}, {"step", rec.step}, {"commits", commits}};
            traj << line.dump() << '\n';
        };
    }

    std::vector<TokenId> out_ids =
        decode(prompt, prov, bias ? &*bias : nullptr, cfg, on_step);

    tsv::Writer w(opt.out);
    write_echo(w, kv);
    std::string text;
    for (size_t i = 0; i < out_ids.size(); ++i) {
        if (i > 0) text += ' ';
        text += prov.vocab().token(out_ids[i]);
    }
    w.raw_line(text);
    if (opt.emit_ids) {
        std::string ids;
        for (size_t i = 0; i < out_ids.size(); ++i) {
            if (i > 0) ids += ' ';
            ids += std::to_string(out_ids[i]);
        }
        w.raw_line(ids);
    }
    w.close();
    fmt::print("decoded {} tokens -> {}\n", out_ids.size(), opt.out);
}

// --- analyze -------------------------------------------------------------------

struct AnalyzeOpts {
    std::vector<std::string> tables;
    std::string out_dir;
    std::vector<double> thresholds = {2.0, 3.0, 5.0};
    std::vector<int32_t> k_values = {100, 500, 1000};
    int32_t top_n = 5;
    std::string dump_config_path;
};

void run_analyze(const AnalyzeOpts& opt) {
    ConfigEcho kv;
    kv.emplace_back("tables", tsv::join(opt.tables, ','));
    kv.emplace_back("out-dir", opt.out_dir);
    kv.emplace_back("thresholds", join_doubles(opt.thresholds));
    {
        std::vector<std::string> parts;
        for (int32_t k : opt.k_values) parts.push_back(std::to_string(k));
        kv.emplace_back("k-values", tsv::join(parts, ','));
    }
    kv.emplace_back("top-n", std::to_string(opt.top_n));
    if (!opt.dump_config_path.empty()) dump_config(kv, opt.dump_config_path);

    std::vector<ScoreTable> tables;
    for (const auto& path : opt.tables) tables.push_back(load_table(path));
    fs::create_directories(opt.out_dir);

    save_cue_strength_report(cue_strength(tables, opt.thresholds),
                             fs::path(opt.out_dir) / "cue_strength.tsv");
    save_top_tokens_report(build_top_tokens_report(tables, opt.top_n),
                           fs::path(opt.out_dir) / "top_tokens.tsv");
    if (tables.size() >= 2) {
        save_jaccard_report(build_jaccard_report(tables, opt.k_values),
                            fs::path(opt.out_dir) / "jaccard.tsv");
    }
    fmt::print("wrote analysis reports to {}\n", opt.out_dir);
}

// --- sweep ---------------------------------------------------------------------

struct SweepOpts {
    std::string corpus;
    std::string target_class;
    std::string out;
    std::vector<double> lambda_grid = {0.0, 0.25, 0.5};
    std::vector<double> tau_grid = {kDefaultTau};
    std::vector<double> alpha_grid = {kDefaultAlpha};
    int32_t seeds = kDefaultEfficacySequences;
    double theta = kDefaultMarkerThreshold;
    uint64_t master_seed = 0;
    int32_t jobs = 1;
    int32_t block_len = 24;
    int32_t num_steps = 24;
    int32_t max_new_tokens = 24;
    double temperature = 1.0;
    bool greedy = false;
    double mu = kDefaultMu;
    double kappa = kDefaultKappa;
    TokenizerOpts tok;
    std::string dump_config_path;
};

void run_sweep(const SweepOpts& opt) {
    ConfigEcho kv;
    kv.emplace_back("corpus", opt.corpus);
    kv.emplace_back("class", opt.target_class);
    kv.emplace_back("out", opt.out);
    kv.emplace_back("lambda-grid", join_doubles(opt.lambda_grid));
    kv.emplace_back("tau-grid", join_doubles(opt.tau_grid));
    kv.emplace_back("alpha-grid", join_doubles(opt.alpha_grid));
    kv.emplace_back("seeds", std::to_string(opt.seeds));
    kv.emplace_back("theta", tsv::format_double(opt.theta));
    kv.emplace_back("master-seed", std::to_string(opt.master_seed));
    kv.emplace_back("jobs", std::to_string(opt.jobs));
    kv.emplace_back("block-len", std::to_string(opt.block_len));
    kv.emplace_back("steps", std::to_string(opt.num_steps));
    kv.emplace_back("max-new-tokens", std::to_string(opt.max_new_tokens));
    kv.emplace_back("temperature", tsv::format_double(opt.temperature));
    kv.emplace_back("greedy", opt.greedy ? "true" : "false");
    kv.emplace_back("mu", tsv::format_double(opt.mu));
    kv.emplace_back("kappa", tsv::format_double(opt.kappa));
    opt.tok.echo(kv);
    if (!opt.dump_config_path.empty()) dump_config(kv, opt.dump_config_path);

    if (opt.jobs < 1) throw ParameterError("jobs must be >= 1");
    if (std::find(opt.lambda_grid.begin(), opt.lambda_grid.end(), 0.0) ==
        opt.lambda_grid.end()) {
        throw ParameterError("lambda grid must contain 0 (the unsteered control)");
    }

    MockModel model = train_mock(opt.corpus, opt.tok.spec(), opt.mu, opt.kappa);

    struct Cell {
        double alpha;
        double tau;
        EfficacyReport report;
    };
    std::vector<Cell> cells;
    for (double alpha : opt.alpha_grid) {
        for (double tau : opt.tau_grid) {
            cells.push_back({alpha, tau, {}});
        }
    }

    std::mutex next_mutex;
    size_t next_cell = 0;
    auto worker = [&] {
        while (true) {
            size_t index;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next_cell >= cells.size()) return;
                index = next_cell++;
            }
            Cell& cell = cells[index];
            EfficacyConfig cfg;
            cfg.decode.block_len = opt.block_len;
            cfg.decode.num_steps = opt.num_steps;
            cfg.decode.max_new_tokens = opt.max_new_tokens;
            cfg.decode.temperature = opt.temperature;
            cfg.decode.greedy = opt.greedy;
            cfg.decode.tau = cell.tau;
            cfg.decode.seed = derive_seed(opt.master_seed, index);
            cfg.tokenizer = opt.tok.spec();
            cfg.alpha = cell.alpha;
            cfg.marker_threshold = opt.theta;
            cfg.num_sequences = opt.seeds;
            cell.report =
                steering_efficacy(opt.corpus, opt.target_class, opt.lambda_grid, cfg, model);
        }
    };
    {
        std::vector<std::thread> pool;
        int32_t n_threads = std::min<int32_t>(opt.jobs, static_cast<int32_t>(cells.size()));
        for (int32_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    tsv::Writer w(opt.out);
    w.meta("report", "sweep");
    write_echo(w, kv);
    w.comment("alpha\ttau\tlambda\tmarker_rate\ttarget_rate");
    for (const auto& cell : cells) {
        for (const auto& row : cell.report.rows) {
            std::vector<std::string> fields = {
                tsv::format_double(cell.alpha),      tsv::format_double(cell.tau),
                tsv::format_double(row.lambda),      tsv::format_double(row.marker_rate),
                tsv::format_double(row.target_rate),
            };
            w.row(fields);
        }
    }
    w.close();
    fmt::print("wrote sweep report ({} cells x {} lambdas) -> {}\n", cells.size(),
               opt.lambda_grid.size(), opt.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Token-score steering for block-wise masked-diffusion decoding"};
    app.require_subcommand(1);

    BuildScoresOpts bs;
    auto* sub_bs = app.add_subcommand("build-scores",
                                      "Build per-class score tables from a labeled corpus");
    sub_bs->add_option("--corpus", bs.corpus, "Corpus root: <root>/<class>/*.txt")->required();
    sub_bs->add_option("--out-dir", bs.out_dir, "Output directory")->required();
    sub_bs->add_option("--alpha", bs.alpha, "Dirichlet prior coefficient")
        ->capture_default_str();
    bs.tok.add_flags(sub_bs);
    sub_bs->add_option("--dump-config", bs.dump_config_path,
                       "Write the effective configuration to a key=value file");
    sub_bs->set_config("--config", "", "Read options from a key=value file");
    sub_bs->callback([&bs] { run_build_scores(bs); });

    MockTrainOpts mt;
    auto* sub_mt = app.add_subcommand("mock-train",
                                      "Train the reference bigram/unigram mock model");
    sub_mt->add_option("--corpus", mt.corpus, "Corpus root: <root>/<class>/*.txt")->required();
    sub_mt->add_option("--out", mt.out, "Output model file")->required();
    sub_mt->add_option("--mu", mt.mu, "Bigram interpolation weight in [0, 1]")
        ->capture_default_str();
    sub_mt->add_option("--kappa", mt.kappa, "Add-kappa smoothing constant")
        ->capture_default_str();
    mt.tok.add_flags(sub_mt);
    sub_mt->add_option("--dump-config", mt.dump_config_path,
                       "Write the effective configuration to a key=value file");
    sub_mt->set_config("--config", "", "Read options from a key=value file");
    sub_mt->callback([&mt] { run_mock_train(mt); });

    DecodeOpts dec;
    auto* sub_dec = app.add_subcommand("decode", "Generate text with optional steering");
    sub_dec->add_option("--table", dec.table_path, "Score table for the target class");
    sub_dec->add_option("--mock-model", dec.mock_model_path, "Mock model file to decode with");
    sub_dec->add_option("--provider-cmd", dec.provider_cmd,
                        "External provider command (line-delimited JSON protocol)");
    sub_dec->add_option("--prompt-file", dec.prompt_file, "Prompt text file");
    sub_dec->add_option("--prompt-ids", dec.prompt_ids,
                        "Prompt as space-separated token ids (required for --provider-cmd)");
    sub_dec->add_option("--out", dec.out, "Output file")->required();
    sub_dec->add_option("--trajectory", dec.trajectory_path,
                        "Write a JSON-lines trajectory log of per-step commits");
    auto* lambda_opt = sub_dec->add_option(
        "--lambda", dec.lambda, "Steering strength (default: profile value; llada 0.7, dream 0.5)");
    sub_dec->add_option("--tau", dec.tau, "Score clipping threshold")->capture_default_str();
    sub_dec->add_option("--temperature", dec.temperature, "Sampling temperature")
        ->capture_default_str();
    sub_dec->add_flag("--greedy", dec.greedy, "Greedy decoding (argmax, lowest-id ties)");
    sub_dec->add_flag("--emit-ids", dec.emit_ids, "Also write the generated token ids");
    sub_dec->add_option("--seed", dec.seed, "Decode seed")->capture_default_str();
    sub_dec->add_option("--block-len", dec.block_len, "Masked block length")
        ->capture_default_str();
    sub_dec->add_option("--steps", dec.num_steps, "Denoising steps per block")
        ->capture_default_str();
    sub_dec->add_option("--max-new-tokens", dec.max_new_tokens, "Total generation budget")
        ->capture_default_str();
    sub_dec->add_option("--profile", dec.profile, "Backbone profile: llada or dream")
        ->capture_default_str()
        ->check(CLI::IsMember({"llada", "dream"}));
    dec.tok.add_flags(sub_dec);
    sub_dec->add_option("--dump-config", dec.dump_config_path,
                        "Write the effective configuration to a key=value file");
    sub_dec->set_config("--config", "", "Read options from a key=value file");
    sub_dec->callback([&dec, lambda_opt] {
        dec.lambda_given = lambda_opt->count() > 0;
        run_decode(dec);
    });

    AnalyzeOpts an;
    auto* sub_an = app.add_subcommand("analyze",
                                      "Cue-strength, top-token and Jaccard reports");
    sub_an->add_option("--tables", an.tables, "Score table files")
        ->required()
        ->delimiter(',');
    sub_an->add_option("--out-dir", an.out_dir, "Output directory")->required();
    sub_an->add_option("--thresholds", an.thresholds, "Cue-strength thresholds")
        ->delimiter(',')
        ->capture_default_str();
    sub_an->add_option("--k-values", an.k_values, "Top-K sizes for Jaccard overlap")
        ->delimiter(',')
        ->capture_default_str();
    sub_an->add_option("--top-n", an.top_n, "Number of top tokens to report")
        ->capture_default_str();
    sub_an->add_option("--dump-config", an.dump_config_path,
                       "Write the effective configuration to a key=value file");
    sub_an->set_config("--config", "", "Read options from a key=value file");
    sub_an->callback([&an] { run_analyze(an); });

    SweepOpts sw;
    auto* sub_sw = app.add_subcommand("sweep",
                                      "Hyperparameter sweep over the synthetic efficacy experiment");
    sub_sw->add_option("--corpus", sw.corpus, "Corpus root: <root>/<class>/*.txt")->required();
    sub_sw->add_option("--class", sw.target_class, "Target class name")->required();
    sub_sw->add_option("--out", sw.out, "Output report file")->required();
    sub_sw->add_option("--lambda-grid", sw.lambda_grid, "Steering strengths (must include 0)")
        ->delimiter(',')
        ->capture_default_str();
    sub_sw->add_option("--tau-grid", sw.tau_grid, "Clipping thresholds")
        ->delimiter(',')
        ->capture_default_str();
    sub_sw->add_option("--alpha-grid", sw.alpha_grid, "Prior coefficients")
        ->delimiter(',')
        ->capture_default_str();
    sub_sw->add_option("--seeds", sw.seeds, "Decodes per grid cell")->capture_default_str();
    sub_sw->add_option("--theta", sw.theta, "Marker zscore threshold")->capture_default_str();
    sub_sw->add_option("--master-seed", sw.master_seed, "Master seed")->capture_default_str();
    sub_sw->add_option("--jobs", sw.jobs, "Parallel cells")->capture_default_str();
    sub_sw->add_option("--block-len", sw.block_len, "Masked block length")
        ->capture_default_str();
    sub_sw->add_option("--steps", sw.num_steps, "Denoising steps per block")
        ->capture_default_str();
    sub_sw->add_option("--max-new-tokens", sw.max_new_tokens, "Total generation budget")
        ->capture_default_str();
    sub_sw->add_option("--temperature", sw.temperature, "Sampling temperature")
        ->capture_default_str();
    sub_sw->add_flag("--greedy", sw.greedy, "Greedy decoding");
    sub_sw->add_option("--mu", sw.mu, "Mock bigram interpolation weight")->capture_default_str();
    sub_sw->add_option("--kappa", sw.kappa, "Mock smoothing constant")->capture_default_str();
    sw.tok.add_flags(sub_sw);
    sub_sw->add_option("--dump-config", sw.dump_config_path,
                       "Write the effective configuration to a key=value file");
    sub_sw->set_config("--config", "", "Read options from a key=value file");
    sub_sw->callback([&sw] { run_sweep(sw); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
