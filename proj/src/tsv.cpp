#include "lexsteer/tsv.hpp"

#include "lexsteer/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <cstdio>

namespace lexsteer::tsv {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& field, const std::filesystem::path& file, int line) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ParseError(fmt::format("{}:{}: expected a finite number, got '{}'",
                                     file.string(), line, field));
    }
    return v;
}

int64_t parse_int(const std::string& field, const std::filesystem::path& file, int line) {
    int64_t v = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(fmt::format("{}:{}: expected an integer, got '{}'",
                                     file.string(), line, field));
    }
    return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
    return split_on(line, '\t');
}

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string join(std::span<const std::string> parts, char sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::optional<std::pair<std::string, std::string>> parse_meta(const std::string& line) {
    if (line.rfind("#!", 0) != 0) return std::nullopt;
    std::string body = line.substr(2);
    size_t start = body.find_first_not_of(' ');
    if (start == std::string::npos) return std::nullopt;
    size_t eq = body.find('=', start);
    if (eq == std::string::npos) return std::nullopt;
    std::string key = body.substr(start, eq - start);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    return std::make_pair(key, body.substr(eq + 1));
}

File read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    }
    File f;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (auto kv = parse_meta(line)) {
            if (f.meta.count(kv->first)) {
                throw ParseError(fmt::format("{}:{}: duplicate metadata key '{}'",
                                             path.string(), line_no, kv->first));
            }
            f.meta.emplace(kv->first, kv->second);
            continue;
        }
        if (line[0] == '#') continue;
        f.rows.push_back({line_no, split_tabs(line)});
    }
    return f;
}

const std::string& require_meta(const File& f, const std::string& key,
                                const std::filesystem::path& path) {
    auto it = f.meta.find(key);
    if (it == f.meta.end()) {
        throw ParseError(fmt::format("{}: missing metadata key '{}'", path.string(), key));
    }
    return it->second;
}

Writer::Writer(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) {
        throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    }
}

Writer::~Writer() {
    if (!closed_ && out_.is_open()) out_.close();
}

void Writer::meta(std::string_view key, std::string_view value) {
    out_ << "#! " << key << '=' << value << '\n';
}

void Writer::meta(std::string_view key, double value) {
    meta(key, format_double(value));
}

void Writer::meta(std::string_view key, int64_t value) {
    meta(key, std::to_string(value));
}

void Writer::meta_block(const std::map<std::string, std::string>& entries) {
    for (const auto& [k, v] : entries) meta(k, v);
}

void Writer::comment(std::string_view text) {
    out_ << "# " << text << '\n';
}

void Writer::row(std::span<const std::string> fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out_ << '\t';
        out_ << fields[i];
    }
    out_ << '\n';
}

void Writer::raw_line(std::string_view line) {
    out_ << line << '\n';
}

void Writer::close() {
    if (closed_) return;
    out_.close();
    if (out_.fail()) {
        throw ConfigError(fmt::format("failed writing '{}'", path_.string()));
    }
    closed_ = true;
}

}  // namespace lexsteer::tsv
