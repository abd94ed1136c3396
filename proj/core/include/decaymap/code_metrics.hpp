#pragma once

#include "decaymap/types.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <string_view>

namespace decaymap {

struct ImportPattern {
    std::string prefix; // line must start with this (after trimming)
    std::string suffix; // target ends at this, or at whitespace when empty
};

struct LanguageSpec {
    std::string name;
    std::vector<std::string> extensions;     // without the dot
    std::string line_comment;                // empty = none
    std::string block_open, block_close;     // empty = none
    std::vector<std::string> branch_tokens;  // words or operator sequences
    std::vector<std::string> function_markers; // "{}" = brace heuristic, else keywords
    std::vector<ImportPattern> import_patterns;
};

class LanguageConfig {
public:
    static LanguageConfig defaults();
    // CSV-like rows: ext,comment_line,comment_open,comment_close,
    //   branch|tokens,function|markers,import%patterns  (last two optional)
    static LanguageConfig load(std::istream& in);

    const LanguageSpec* for_path(const std::filesystem::path& p) const;
    const LanguageSpec* for_extension(std::string_view ext) const;
    void add(LanguageSpec spec);

private:
    std::vector<LanguageSpec> specs_;
    std::map<std::string, std::size_t, std::less<>> by_extension_;
};

struct CodeMetrics {
    std::uint32_t sloc = 0;
    std::uint32_t ccn = 0;
    std::string language;
    bool undecodable = false; // binary-looking content was counted opaquely
};

// Comment- and string-aware split of a source text. Comment characters become
// spaces, string contents become \x01 markers, code stays put, so line
// emptiness and token scans work on `masked`.
struct ScannedSource {
    std::string masked;
    std::vector<std::string> comments; // one entry per line or block comment
    std::size_t line_count = 0;
};

ScannedSource scan_source(std::string_view text, const LanguageSpec& lang);

// Non-blank, non-comment-only lines. Undecodable (NUL-bearing) input is
// counted as opaque code lines and flagged via analyze_source.
std::uint32_t count_sloc(std::string_view text, const LanguageSpec& lang);

// Token-count cyclomatic complexity: detected functions + branch tokens
// outside comments and strings. No functions: 1 if any code, 0 if empty.
std::uint32_t cyclomatic(std::string_view text, const LanguageSpec& lang);

CodeMetrics analyze_source(std::string_view text, const LanguageSpec& lang);

struct TreeMetrics {
    std::map<std::string, CodeMetrics> by_path; // root-relative
    std::size_t unreadable = 0;
    std::size_t unknown_language = 0;
};

TreeMetrics scan_tree(const std::filesystem::path& root, const LanguageConfig& config);

} // namespace decaymap
