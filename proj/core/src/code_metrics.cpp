#include "decaymap/code_metrics.hpp"

#include "decaymap/csv.hpp"
#include "decaymap/util.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace decaymap {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            if (start < s.size()) out.emplace_back(s.substr(start));
            break;
        }
        if (pos > start) out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

ImportPattern parse_import_pattern(std::string_view s) {
    // `%` marks the target: "#include \"%\"" -> prefix `#include "`, suffix `"`.
    auto pos = s.find('%');
    if (pos == std::string_view::npos) return {std::string(s), ""};
    return {std::string(s.substr(0, pos)), std::string(s.substr(pos + 1))};
}

} // namespace

LanguageConfig LanguageConfig::defaults() {
    LanguageConfig cfg;

    LanguageSpec cfamily;
    cfamily.name = "cpp";
    cfamily.extensions = {"c", "h", "cc", "hh", "cpp", "hpp", "cxx", "hxx", "java", "js", "ts", "cs", "go"};
    cfamily.line_comment = "//";
    cfamily.block_open = "/*";
    cfamily.block_close = "*/";
    cfamily.branch_tokens = {"if", "for", "while", "case", "catch", "&&", "||", "?"};
    cfamily.function_markers = {"{}"};
    cfamily.import_patterns = {parse_import_pattern("#include \"%\""),
                               parse_import_pattern("import %"),
                               parse_import_pattern("use %")};
    cfg.add(std::move(cfamily));

    LanguageSpec python;
    python.name = "python";
    python.extensions = {"py"};
    python.line_comment = "#";
    python.branch_tokens = {"if", "for", "while", "elif", "except", "and", "or"};
    python.function_markers = {"def"};
    python.import_patterns = {parse_import_pattern("import %"),
                              parse_import_pattern("from % import")};
    cfg.add(std::move(python));

    LanguageSpec rust;
    rust.name = "rust";
    rust.extensions = {"rs"};
    rust.line_comment = "//";
    rust.block_open = "/*";
    rust.block_close = "*/";
    rust.branch_tokens = {"if", "for", "while", "match", "&&", "||"};
    rust.function_markers = {"fn"};
    rust.import_patterns = {parse_import_pattern("use %"), parse_import_pattern("mod %")};
    cfg.add(std::move(rust));

    return cfg;
}

LanguageConfig LanguageConfig::load(std::istream& in) {
    if (!in.good()) throw Error("language config: unreadable input");
    LanguageConfig cfg;
    bool first = true;
    while (auto row = csv::read_row(in)) {
        if (row->empty() || (row->size() == 1 && (*row)[0].empty())) continue;
        if (first) {
            first = false;
            if ((*row)[0] == "ext") continue;
        }
        if (row->size() < 5)
            throw Error("language config: need at least 5 fields per row");
        LanguageSpec spec;
        spec.name = (*row)[0];
        spec.extensions = {(*row)[0]};
        spec.line_comment = (*row)[1];
        spec.block_open = (*row)[2];
        spec.block_close = (*row)[3];
        spec.branch_tokens = split_list((*row)[4], '|');
        if (row->size() >= 6) spec.function_markers = split_list((*row)[5], '|');
        if (row->size() >= 7)
            for (const std::string& p : split_list((*row)[6], '|'))
                spec.import_patterns.push_back(parse_import_pattern(p));
        cfg.add(std::move(spec));
    }
    return cfg;
}

void LanguageConfig::add(LanguageSpec spec) {
    std::size_t idx = specs_.size();
    specs_.push_back(std::move(spec));
    for (const std::string& ext : specs_[idx].extensions)
        by_extension_[ext] = idx;
}

const LanguageSpec* LanguageConfig::for_extension(std::string_view ext) const {
    auto it = by_extension_.find(ext);
    return it == by_extension_.end() ? nullptr : &specs_[it->second];
}

const LanguageSpec* LanguageConfig::for_path(const std::filesystem::path& p) const {
    std::string ext = p.extension().string();
    if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
    return for_extension(ext);
}

ScannedSource scan_source(std::string_view text, const LanguageSpec& lang) {
    enum class State { code, line_comment, block_comment, dq_string, sq_string };

    ScannedSource out;
    out.masked = std::string(text);
    State state = State::code;
    std::string comment;

    const bool has_line = !lang.line_comment.empty();
    const bool has_block = !lang.block_open.empty() && !lang.block_close.empty();

    auto at = [&](std::size_t i, const std::string& tok) {
        return !tok.empty() && text.compare(i, tok.size(), tok) == 0;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        switch (state) {
            case State::code:
                if (has_line && at(i, lang.line_comment)) {
                    state = State::line_comment;
                    comment.clear();
                    for (std::size_t k = 0; k < lang.line_comment.size(); ++k) out.masked[i + k] = ' ';
                    i += lang.line_comment.size();
                    continue;
                }
                if (has_block && at(i, lang.block_open)) {
                    state = State::block_comment;
                    comment.clear();
                    for (std::size_t k = 0; k < lang.block_open.size(); ++k) out.masked[i + k] = ' ';
                    i += lang.block_open.size();
                    continue;
                }
                if (c == '"') {
                    state = State::dq_string;
                    out.masked[i] = '\x01';
                } else if (c == '\'') {
                    state = State::sq_string;
                    out.masked[i] = '\x01';
                }
                ++i;
                break;
            case State::line_comment:
                if (c == '\n') {
                    out.comments.push_back(comment);
                    state = State::code;
                } else {
                    comment.push_back(c);
                    out.masked[i] = ' ';
                }
                ++i;
                break;
            case State::block_comment:
                if (at(i, lang.block_close)) {
                    out.comments.push_back(comment);
                    for (std::size_t k = 0; k < lang.block_close.size(); ++k) out.masked[i + k] = ' ';
                    i += lang.block_close.size();
                    state = State::code;
                    continue;
                }
                if (c != '\n') out.masked[i] = ' ';
                comment.push_back(c);
                ++i;
                break;
            case State::dq_string:
            case State::sq_string: {
                char quote = state == State::dq_string ? '"' : '\'';
                if (c == '\\' && i + 1 < text.size()) {
                    out.masked[i] = '\x01';
                    if (text[i + 1] != '\n') out.masked[i + 1] = '\x01';
                    i += 2;
                    continue;
                }
                if (c == quote) {
                    out.masked[i] = '\x01';
                    state = State::code;
                } else if (c != '\n') {
                    out.masked[i] = '\x01';
                }
                ++i;
                break;
            }
        }
    }
    if (state == State::line_comment || state == State::block_comment)
        out.comments.push_back(comment);

    out.line_count = text.empty() ? 0 : std::count(text.begin(), text.end(), '\n') +
                                            (text.back() == '\n' ? 0 : 1);
    return out;
}

namespace {

bool looks_binary(std::string_view text) {
    return text.find('\0') != std::string_view::npos;
}

std::uint32_t sloc_of_masked(const std::string& masked) {
    std::uint32_t count = 0;
    bool line_has_code = false;
    for (char c : masked) {
        if (c == '\n') {
            if (line_has_code) ++count;
            line_has_code = false;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            line_has_code = true;
        }
    }
    if (line_has_code) ++count;
    return count;
}

std::uint32_t count_word_token(const std::string& masked, const std::string& word) {
    std::uint32_t n = 0;
    std::size_t pos = 0;
    while ((pos = masked.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_word_char(masked[pos - 1]);
        std::size_t end = pos + word.size();
        bool right_ok = end >= masked.size() || !is_word_char(masked[end]);
        if (left_ok && right_ok) ++n;
        pos = end;
    }
    return n;
}

std::uint32_t count_plain_token(const std::string& masked, const std::string& tok) {
    std::uint32_t n = 0;
    std::size_t pos = 0;
    while ((pos = masked.find(tok, pos)) != std::string::npos) {
        ++n;
        pos += tok.size();
    }
    return n;
}

bool is_word_token(const std::string& tok) {
    return !tok.empty() && std::all_of(tok.begin(), tok.end(), is_word_char);
}

// `) {` preceded by an identifier that is not a control keyword.
std::uint32_t count_brace_functions(const std::string& masked) {
    static const char* kControl[] = {"if", "for", "while", "switch", "catch", "return",
                                     "do", "else", "case"};
    std::uint32_t n = 0;
    for (std::size_t i = 0; i < masked.size(); ++i) {
        if (masked[i] != '{') continue;
        std::size_t j = i;
        while (j > 0 && std::isspace(static_cast<unsigned char>(masked[j - 1]))) --j;
        if (j == 0 || masked[j - 1] != ')') continue;
        // Find the matching open paren.
        int depth = 0;
        std::size_t k = j;
        while (k > 0) {
            --k;
            if (masked[k] == ')') ++depth;
            else if (masked[k] == '(') {
                --depth;
                if (depth == 0) break;
            }
        }
        if (depth != 0) continue;
        while (k > 0 && std::isspace(static_cast<unsigned char>(masked[k - 1]))) --k;
        std::size_t word_end = k;
        while (k > 0 && is_word_char(masked[k - 1])) --k;
        if (k == word_end) continue; // lambda or expression, not a named function
        std::string word = masked.substr(k, word_end - k);
        bool control = std::any_of(std::begin(kControl), std::end(kControl),
                                   [&](const char* w) { return word == w; });
        if (!control) ++n;
    }
    return n;
}

} // namespace

std::uint32_t count_sloc(std::string_view text, const LanguageSpec& lang) {
    return analyze_source(text, lang).sloc;
}

std::uint32_t cyclomatic(std::string_view text, const LanguageSpec& lang) {
    return analyze_source(text, lang).ccn;
}

CodeMetrics analyze_source(std::string_view text, const LanguageSpec& lang) {
    CodeMetrics m;
    m.language = lang.name;
    // NUL bytes pass through the scanner as opaque code characters, so lines
    // bearing them still count; the file is flagged for the caller.
    m.undecodable = looks_binary(text);

    ScannedSource scanned = scan_source(text, lang);
    m.sloc = sloc_of_masked(scanned.masked);

    std::uint32_t branches = 0;
    for (const std::string& tok : lang.branch_tokens)
        branches += is_word_token(tok) ? count_word_token(scanned.masked, tok)
                                       : count_plain_token(scanned.masked, tok);

    std::uint32_t functions = 0;
    for (const std::string& marker : lang.function_markers)
        functions += marker == "{}" ? count_brace_functions(scanned.masked)
                                    : count_word_token(scanned.masked, marker);

    if (functions == 0)
        m.ccn = m.sloc > 0 ? 1 : 0;
    else
        m.ccn = functions + branches;
    return m;
}

TreeMetrics scan_tree(const std::filesystem::path& root, const LanguageConfig& config) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw Error("scan_tree: not a directory: " + root.string());

    TreeMetrics out;
    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it)
        if (it->is_regular_file()) files.push_back(fs::relative(it->path(), root));
    std::sort(files.begin(), files.end());

    for (const fs::path& rel : files) {
        const LanguageSpec* lang = config.for_path(rel);
        if (!lang) {
            ++out.unknown_language;
            continue;
        }
        std::ifstream in(root / rel, std::ios::binary);
        if (!in) {
            ++out.unreadable;
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        out.by_path[rel.generic_string()] = analyze_source(buf.str(), *lang);
    }
    return out;
}

} // namespace decaymap
