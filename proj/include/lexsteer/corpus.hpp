#pragma once

#include "lexsteer/tokenizer.hpp"
#include "lexsteer/vocab.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lexsteer {

// Per-class token counts c_k(v) and totals N_k for a K-way control task.
struct ClassCounts {
    std::vector<std::string> class_names;       // lexicographic directory order
    std::vector<std::vector<int64_t>> counts;   // [class][token id]
    std::vector<int64_t> totals;                // N_k = sum_v counts[k][v]

    int32_t num_classes() const { return static_cast<int32_t>(class_names.size()); }
    int32_t vocab_size() const {
        return counts.empty() ? 0 : static_cast<int32_t>(counts.front().size());
    }
};

// Walks <root>/<class>/*.txt in lexicographic order (classes, then files) and
// invokes the callback once per document line. Vocab ids are therefore
// reproducible across runs. Throws ConfigError on bad layout and
// IngestionError (with file/line context) on unreadable documents.
void walk_labeled_corpus(
    const std::filesystem::path& root, const TokenizerSpec& spec, Vocab& vocab,
    const std::function<void(int class_index, const std::string& class_name,
                             std::span<const TokenId> doc)>& on_document);

// Ingests a directory-per-class corpus and produces per-class token counts.
// Errors: fewer than 2 class subdirectories, or a class with zero tokens.
std::pair<Vocab, ClassCounts> load_labeled_corpus(const std::filesystem::path& root,
                                                  const TokenizerSpec& spec);

// pooled[v] = sum_k counts[k][v].
std::vector<int64_t> pooled_counts(const ClassCounts& counts);

// Tab-separated export: header `token id c_<class1> ... c_<classK>`, rows
// sorted by id, final `# totals:` comment line. Extra metadata (if any) is
// written as leading `#!` lines.
void save_count_table(const Vocab& vocab, const ClassCounts& counts,
                      const std::filesystem::path& path,
                      const std::map<std::string, std::string>& meta = {});

}  // namespace lexsteer
