#include "decaymap/graph.hpp"

#include "decaymap/code_metrics.hpp"
#include "decaymap/csv.hpp"
#include "decaymap/util.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace decaymap {

AuthorDirectory::AuthorDirectory(std::span<const CommitRecord> commits) {
    for (const CommitRecord& c : commits) {
        if (index_.emplace(c.author_id, static_cast<std::uint32_t>(names_.size())).second)
            names_.push_back(c.author_id);
    }
}

std::optional<std::uint32_t> AuthorDirectory::find(std::string_view author) const {
    auto it = index_.find(author);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t WeightedGraph::add_node(NodeKey key) {
    auto [it, inserted] = index_.emplace(key, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) {
        nodes_.push_back(key);
        out_.emplace_back();
        if (directed_) in_.emplace_back();
    }
    return it->second;
}

void WeightedGraph::add_edge(NodeKey a, NodeKey b, double w) {
    if (a == b) return; // no self-edges in any layer
    std::uint32_t u = add_node(a);
    std::uint32_t v = add_node(b);
    auto accumulate = [](std::map<std::uint32_t, double>& adj, std::uint32_t t, double wt, bool& fresh) {
        auto [it, inserted] = adj.emplace(t, wt);
        if (!inserted) it->second += wt;
        fresh = inserted;
    };
    bool fresh = false;
    accumulate(out_[u], v, w, fresh);
    if (fresh) ++edge_count_;
    if (directed_) {
        bool fresh_in = false;
        accumulate(in_[v], u, w, fresh_in);
    } else {
        bool fresh_rev = false;
        accumulate(out_[v], u, w, fresh_rev);
    }
}

std::optional<std::uint32_t> WeightedGraph::find(NodeKey key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double WeightedGraph::weight(NodeKey a, NodeKey b) const {
    auto u = find(a);
    auto v = find(b);
    if (!u || !v) return 0.0;
    auto it = out_[*u].find(*v);
    return it == out_[*u].end() ? 0.0 : it->second;
}

double WeightedGraph::max_edge_weight() const {
    double mx = 0.0;
    for (const auto& adj : out_)
        for (const auto& [v, w] : adj) mx = std::max(mx, w);
    return mx;
}

WeightedGraph build_cochange_graph(std::span<const CommitRecord> commits,
                                   const FileIdentityMap& ids,
                                   const TimeWindow& window,
                                   std::size_t max_files) {
    if (max_files < 2) throw Error("build_cochange_graph: max_files must be >= 2");
    WeightedGraph g(false);
    for (const CommitRecord& c : commits) {
        if (!window.contains(c.timestamp)) continue;
        std::vector<IdentityId> touched = touched_identities(c, ids);
        if (touched.size() < 2 || touched.size() > max_files) continue;
        for (std::size_t i = 0; i < touched.size(); ++i)
            for (std::size_t j = i + 1; j < touched.size(); ++j)
                g.add_edge(file_node(touched[i]), file_node(touched[j]), 1.0);
    }
    return g;
}

WeightedGraph build_authorship_graph(std::span<const CommitRecord> commits,
                                     const FileIdentityMap& ids,
                                     const AuthorDirectory& authors,
                                     const TimeWindow& window) {
    WeightedGraph g(false);
    for (const CommitRecord& c : commits) {
        if (!window.contains(c.timestamp)) continue;
        auto a = authors.find(c.author_id);
        if (!a) continue;
        for (IdentityId id : touched_identities(c, ids))
            g.add_edge(author_node(*a), file_node(id), 1.0);
    }
    return g;
}

DependencyLoadResult load_dependency_edges(std::istream& in, const FileIdentityMap& ids) {
    if (!in.good()) throw Error("load_dependency_edges: unreadable input");
    DependencyLoadResult result;
    bool first = true;
    while (auto row = csv::read_row(in)) {
        if (row->empty() || (row->size() == 1 && (*row)[0].empty())) continue;
        if (first) {
            first = false;
            if ((*row)[0] == "src") continue; // optional header
        }
        if (row->size() < 2) {
            ++result.unresolved;
            continue;
        }
        const std::string& src = (*row)[0];
        const std::string& dst = (*row)[1];
        if (src == dst) {
            ++result.self_dropped;
            continue;
        }
        auto s = ids.try_resolve_current(src);
        auto d = ids.try_resolve_current(dst);
        if (!s || !d) {
            ++result.unresolved;
            continue;
        }
        // Dedup: weight stays 1 per unique directed pair.
        if (result.layer.weight(file_node(*s), file_node(*d)) == 0.0)
            result.layer.add_edge(file_node(*s), file_node(*d), 1.0);
    }
    return result;
}

namespace {

// Root-relative paths of candidate import targets, tried in order:
// relative to the importer's directory, then relative to the root.
std::optional<std::string> resolve_import(const std::filesystem::path& root,
                                          const std::filesystem::path& importer_rel,
                                          const std::string& target) {
    namespace fs = std::filesystem;
    std::vector<fs::path> candidates;
    fs::path t(target);
    candidates.push_back(importer_rel.parent_path() / t);
    candidates.push_back(t);
    // Module-style target: dots to slashes, importer extension appended.
    if (target.find('.') != std::string::npos && target.find('/') == std::string::npos) {
        std::string slashed = target;
        std::replace(slashed.begin(), slashed.end(), '.', '/');
        candidates.push_back(fs::path(slashed + importer_rel.extension().string()));
    } else if (t.extension().empty()) {
        candidates.push_back(fs::path(target + importer_rel.extension().string()));
    }
    for (const fs::path& c : candidates) {
        fs::path normal = c.lexically_normal();
        std::error_code ec;
        if (fs::is_regular_file(root / normal, ec))
            return normal.generic_string();
    }
    return std::nullopt;
}

} // namespace

ImportScanResult scan_imports(const std::filesystem::path& source_root,
                              const LanguageConfig& config) {
    namespace fs = std::filesystem;
    ImportScanResult result;
    if (!fs::is_directory(source_root))
        throw Error("scan_imports: not a directory: " + source_root.string());

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(source_root); it != fs::recursive_directory_iterator(); ++it)
        if (it->is_regular_file()) files.push_back(fs::relative(it->path(), source_root));
    std::sort(files.begin(), files.end());

    for (const fs::path& rel : files) {
        const LanguageSpec* lang = config.for_path(rel);
        if (!lang || lang->import_patterns.empty()) continue;
        std::ifstream in(source_root / rel, std::ios::binary);
        if (!in) {
            ++result.unreadable;
            continue;
        }
        std::string line;
        std::set<std::string> seen;
        while (std::getline(in, line)) {
            std::string_view sv = trim(line);
            for (const ImportPattern& pat : lang->import_patterns) {
                if (!sv.starts_with(pat.prefix)) continue;
                std::string_view rest = sv.substr(pat.prefix.size());
                std::string target;
                if (!pat.suffix.empty()) {
                    auto pos = rest.find(pat.suffix);
                    if (pos == std::string_view::npos) continue;
                    target = std::string(rest.substr(0, pos));
                } else {
                    auto pos = rest.find_first_of(" \t;");
                    target = std::string(pos == std::string_view::npos ? rest : rest.substr(0, pos));
                }
                if (target.empty()) continue;
                auto resolved = resolve_import(source_root, rel, target);
                if (!resolved) {
                    ++result.unresolved;
                    break;
                }
                std::string importer = rel.generic_string();
                if (*resolved != importer && seen.insert(*resolved).second)
                    result.edges.emplace_back(importer, *resolved);
                break;
            }
        }
    }
    return result;
}

DependencyLoadResult dependency_from_paths(const ImportScanResult& scan,
                                           const FileIdentityMap& ids) {
    DependencyLoadResult result;
    result.unresolved = scan.unresolved;
    for (const auto& [src, dst] : scan.edges) {
        auto s = ids.try_resolve_current(src);
        auto d = ids.try_resolve_current(dst);
        if (!s || !d) {
            ++result.unresolved;
            continue;
        }
        if (*s == *d) {
            ++result.self_dropped;
            continue;
        }
        if (result.layer.weight(file_node(*s), file_node(*d)) == 0.0)
            result.layer.add_edge(file_node(*s), file_node(*d), 1.0);
    }
    return result;
}

WeightedGraph combine_networks(const WeightedGraph& dependency,
                               const WeightedGraph& cochange,
                               const WeightedGraph& authorship,
                               const std::array<double, 3>& multipliers,
                               bool normalize_layers) {
    for (double m : multipliers)
        if (m < 0) throw Error("combine_networks: multipliers must be non-negative");
    if (multipliers[0] == 0 && multipliers[1] == 0 && multipliers[2] == 0)
        throw Error("combine_networks: all multipliers are zero");

    WeightedGraph combined(false);
    const WeightedGraph* layers[3] = {&dependency, &cochange, &authorship};
    for (int li = 0; li < 3; ++li) {
        const WeightedGraph& layer = *layers[li];
        double scale = multipliers[li];
        if (scale == 0) continue;
        if (normalize_layers) {
            double mx = layer.max_edge_weight();
            if (mx > 0) scale /= mx;
        }
        for (const NodeKey& n : layer.nodes()) combined.add_node(n);
        for (std::uint32_t u = 0; u < layer.node_count(); ++u) {
            for (const auto& [v, w] : layer.out_edges(u)) {
                if (!layer.directed() && v < u) continue; // each undirected edge once
                // Directed layers symmetrize via the transpose; an undirected
                // combined edge accumulates both directions.
                combined.add_edge(layer.nodes()[u], layer.nodes()[v], w * scale);
            }
        }
    }
    return combined;
}

void export_edge_list(std::ostream& out, const WeightedGraph& g, std::string_view layer_name,
                      const FileIdentityMap& ids, const AuthorDirectory& authors) {
    auto label = [&](NodeKey key) {
        return key.kind == NodeKind::file ? ids.current_path(key.id) : authors.name(key.id);
    };
    for (std::uint32_t u = 0; u < g.node_count(); ++u) {
        for (const auto& [v, w] : g.out_edges(u)) {
            if (!g.directed() && v < u) continue;
            csv::write_row(out, {std::string(layer_name), label(g.nodes()[u]), label(g.nodes()[v]),
                                 format_double(w)});
        }
    }
}

} // namespace decaymap
