#include "lexsteer/corpus.hpp"

#include "lexsteer/errors.hpp"
#include "lexsteer/tsv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace lexsteer {

namespace {

std::vector<fs::path> sorted_class_dirs(const fs::path& root) {
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw ConfigError(fmt::format("corpus root '{}' is not a directory", root.string()));
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (dirs.size() < 2) {
        throw ConfigError(fmt::format(
            "corpus root '{}' has {} class subdirectories; a control task needs at least 2",
            root.string(), dirs.size()));
    }
    for (const auto& d : dirs) {
        std::string name = d.filename().string();
        if (name.find_first_of(" \t,=") != std::string::npos) {
            throw ConfigError(fmt::format(
                "class directory name '{}' contains whitespace, ',' or '='", name));
        }
    }
    return dirs;
}

std::vector<fs::path> sorted_txt_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

}  // namespace

void walk_labeled_corpus(
    const fs::path& root, const TokenizerSpec& spec, Vocab& vocab,
    const std::function<void(int, const std::string&, std::span<const TokenId>)>& on_document) {
    auto dirs = sorted_class_dirs(root);
    for (size_t k = 0; k < dirs.size(); ++k) {
        const std::string class_name = dirs[k].filename().string();
        for (const auto& file : sorted_txt_files(dirs[k])) {
            std::ifstream in(file, std::ios::binary);
            if (!in) {
                throw ConfigError(fmt::format("cannot open '{}'", file.string()));
            }
            std::string line;
            int line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                std::vector<TokenId> doc;
                try {
                    doc = tokenize(line, spec, vocab);
                } catch (const IngestionError& e) {
                    throw IngestionError(
                        fmt::format("{}:{}: {}", file.string(), line_no, e.what()));
                }
                on_document(static_cast<int>(k), class_name, doc);
            }
        }
    }
}

std::pair<Vocab, ClassCounts> load_labeled_corpus(const fs::path& root,
                                                  const TokenizerSpec& spec) {
    Vocab vocab;
    ClassCounts counts;
    walk_labeled_corpus(root, spec, vocab,
                        [&](int k, const std::string& name, std::span<const TokenId> doc) {
                            if (k >= counts.num_classes()) {
                                counts.class_names.push_back(name);
                                counts.counts.emplace_back();
                                counts.totals.push_back(0);
                            }
                            auto& row = counts.counts[static_cast<size_t>(k)];
                            for (TokenId id : doc) {
                                if (static_cast<size_t>(id) >= row.size()) {
                                    row.resize(static_cast<size_t>(id) + 1, 0);
                                }
                                ++row[static_cast<size_t>(id)];
                                ++counts.totals[static_cast<size_t>(k)];
                            }
                        });
    // Pad every class row to the final vocabulary size.
    for (auto& row : counts.counts) {
        row.resize(static_cast<size_t>(vocab.size()), 0);
    }
    for (size_t k = 0; k < counts.class_names.size(); ++k) {
        if (counts.totals[k] == 0) {
            throw ConfigError(
                fmt::format("class '{}' contains no tokens", counts.class_names[k]));
        }
    }
    return {std::move(vocab), std::move(counts)};
}

std::vector<int64_t> pooled_counts(const ClassCounts& counts) {
    std::vector<int64_t> pooled(static_cast<size_t>(counts.vocab_size()), 0);
    for (const auto& row : counts.counts) {
        for (size_t v = 0; v < row.size(); ++v) pooled[v] += row[v];
    }
    return pooled;
}

void save_count_table(const Vocab& vocab, const ClassCounts& counts, const fs::path& path,
                      const std::map<std::string, std::string>& meta) {
    if (vocab.size() != counts.vocab_size()) {
        throw ShapeError(fmt::format("vocab size {} does not match count table width {}",
                                     vocab.size(), counts.vocab_size()));
    }
    tsv::Writer w(path);
    w.meta_block(meta);
    std::string header = "token\tid";
    for (const auto& name : counts.class_names) header += fmt::format("\tc_{}", name);
    w.raw_line(header);
    for (TokenId id = 0; id < vocab.size(); ++id) {
        std::vector<std::string> fields = {vocab.token(id), std::to_string(id)};
        for (const auto& row : counts.counts) {
            fields.push_back(std::to_string(row[static_cast<size_t>(id)]));
        }
        w.row(fields);
    }
    std::string totals = "# totals:";
    for (int64_t n : counts.totals) totals += fmt::format("\t{}", n);
    w.raw_line(totals);
    w.close();
}

}  // namespace lexsteer
