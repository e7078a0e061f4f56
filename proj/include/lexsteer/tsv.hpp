#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexsteer::tsv {

// All numeric fields are rendered with 17 significant digits, enough for an
// exact double round-trip.
std::string format_double(double v);

double parse_double(const std::string& field, const std::filesystem::path& file, int line);
int64_t parse_int(const std::string& field, const std::filesystem::path& file, int line);

std::vector<std::string> split_tabs(const std::string& line);
std::vector<std::string> split_on(const std::string& text, char sep);
std::string join(std::span<const std::string> parts, char sep);

// Returns (key, value) for a "#! key=value" metadata line, nothing otherwise.
std::optional<std::pair<std::string, std::string>> parse_meta(const std::string& line);

struct Row {
    int line = 0;
    std::vector<std::string> fields;
};

struct File {
    std::map<std::string, std::string> meta;  // duplicate keys are a ParseError
    std::vector<Row> rows;                    // data rows in file order
};

// Reads a tab-separated file: collects "#!" metadata, skips "#" comments,
// splits data rows on tabs. Throws ParseError / ConfigError.
File read_file(const std::filesystem::path& path);

// Requires meta[key] to exist; ParseError otherwise.
const std::string& require_meta(const File& f, const std::string& key,
                                const std::filesystem::path& path);

class Writer {
  public:
    explicit Writer(const std::filesystem::path& path);
    ~Writer();

    void meta(std::string_view key, std::string_view value);
    void meta(std::string_view key, double value);
    void meta(std::string_view key, int64_t value);
    void meta_block(const std::map<std::string, std::string>& entries);  // sorted by key
    void comment(std::string_view text);
    void row(std::span<const std::string> fields);
    void raw_line(std::string_view line);

    void close();  // throws on I/O failure; safe to call twice

  private:
    std::filesystem::path path_;
    std::ofstream out_;
    bool closed_ = false;
};

}  // namespace lexsteer::tsv
