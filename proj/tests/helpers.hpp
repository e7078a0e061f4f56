#pragma once

#include "lexsteer/corpus.hpp"
#include "lexsteer/rng.hpp"
#include "lexsteer/vocab.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace lexsteer::testing {

namespace fs = std::filesystem;

class TempDir {
  public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "lexsteer-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

  private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("write_file failed: " + path.string());
}

// The fixture from the corpus examples: two classes with documents
// "a a b" and "b b a".
inline fs::path make_two_class_fixture(const fs::path& dir) {
    write_file(dir / "corpus" / "one" / "doc.txt", "a a b\n");
    write_file(dir / "corpus" / "two" / "doc.txt", "b b a\n");
    return dir / "corpus";
}

// Two classes with disjoint 8-token marker vocabularies plus shared filler.
// Each document is "the M M of M M and M M the" (10 tokens, 6 markers), so
// with 60 documents per class every marker appears 45 times and lands a
// zscore around 3 at alpha = 0.01.
inline fs::path write_synthetic_two_class_corpus(const fs::path& dir, int docs_per_class = 60) {
    static const char* kCalm[8] = {"amber", "apple",  "anchor", "acorn",
                                   "aspen", "arrow", "atlas",  "auburn"};
    static const char* kVivid[8] = {"boulder", "basket", "beacon", "bramble",
                                    "breeze",  "bronze", "bucket", "burrow"};
    auto write_class = [&](const char* name, const char* const (&m)[8]) {
        fs::create_directories(dir / "corpus" / name);
        std::ofstream out(dir / "corpus" / name / "docs.txt");
        for (int i = 0; i < docs_per_class; ++i) {
            out << "the " << m[i % 8] << ' ' << m[(i + 1) % 8] << " of " << m[(i + 2) % 8] << ' '
                << m[(i + 3) % 8] << " and " << m[(i + 4) % 8] << ' ' << m[(i + 5) % 8]
                << " the\n";
        }
    };
    write_class("calm", kCalm);
    write_class("vivid", kVivid);
    return dir / "corpus";
}

struct CountsFixture {
    Vocab vocab;
    ClassCounts counts;
};

// Random count table satisfying the scoring preconditions: every class has a
// positive total and at least two tokens have positive pooled count.
inline CountsFixture make_random_counts(RngStream& rng, int vocab_size, int num_classes,
                                        int max_count) {
    CountsFixture f;
    for (int v = 0; v < vocab_size; ++v) f.vocab.intern("t" + std::to_string(v));
    for (int k = 0; k < num_classes; ++k) {
        f.counts.class_names.push_back("c" + std::to_string(k));
        std::vector<int64_t> row(static_cast<size_t>(vocab_size), 0);
        for (auto& c : row) {
            c = static_cast<int64_t>(rng.next_u64() % static_cast<uint64_t>(max_count + 1));
        }
        f.counts.counts.push_back(std::move(row));
    }
    int positive_tokens = 0;
    for (int v = 0; v < vocab_size; ++v) {
        int64_t pooled = 0;
        for (const auto& row : f.counts.counts) pooled += row[static_cast<size_t>(v)];
        if (pooled > 0) ++positive_tokens;
    }
    if (positive_tokens < 2 && vocab_size >= 2) {
        f.counts.counts[0][0] += 1;
        f.counts.counts[static_cast<size_t>(num_classes) - 1][1] += 1;
    }
    for (int k = 0; k < num_classes; ++k) {
        auto& row = f.counts.counts[static_cast<size_t>(k)];
        int64_t total = 0;
        for (int64_t c : row) total += c;
        if (total == 0) {
            row[static_cast<size_t>(k % vocab_size)] += 1;
            total = 1;
        }
        f.counts.totals.push_back(total);
    }
    return f;
}

struct CmdResult {
    int status = -1;
    std::string output;  // stdout and stderr interleaved
};

inline CmdResult run_cmd(const std::string& cmd) {
    CmdResult result;
    std::string full = cmd + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
        result.output.append(buf, n);
    }
    int rc = pclose(pipe);
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return result;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file failed: " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Relative comparison with a tiny absolute floor for values that are zero up
// to rounding.
inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
    double diff = a > b ? a - b : b - a;
    double mag_a = a < 0 ? -a : a;
    double mag_b = b < 0 ? -b : b;
    double scale = mag_a > mag_b ? mag_a : mag_b;
    return diff <= rel * scale + abs_floor;
}

}  // namespace lexsteer::testing
