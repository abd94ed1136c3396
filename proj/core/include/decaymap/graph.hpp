#pragma once

#include "decaymap/ingest.hpp"
#include "decaymap/types.hpp"

#include <array>
#include <compare>
#include <filesystem>
#include <map>

namespace decaymap {

enum class NodeKind : std::uint8_t { file, author };

struct NodeKey {
    NodeKind kind = NodeKind::file;
    std::uint32_t id = 0; // identity id for files, directory index for authors
    auto operator<=>(const NodeKey&) const = default;
};

inline NodeKey file_node(IdentityId id) { return {NodeKind::file, id}; }
inline NodeKey author_node(std::uint32_t idx) { return {NodeKind::author, idx}; }

// Deterministic author-string <-> index registry shared across layers.
class AuthorDirectory {
public:
    explicit AuthorDirectory(std::span<const CommitRecord> commits);

    std::optional<std::uint32_t> find(std::string_view author) const;
    const std::string& name(std::uint32_t idx) const { return names_.at(idx); }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_; // first-appearance order
    std::map<std::string, std::uint32_t, std::less<>> index_;
};

// Sparse weighted graph; parallel edge insertions accumulate weight.
// Self-edges are silently dropped (no layer admits them).
class WeightedGraph {
public:
    explicit WeightedGraph(bool directed) : directed_(directed) {}

    bool directed() const { return directed_; }
    std::uint32_t add_node(NodeKey key);
    void add_edge(NodeKey a, NodeKey b, double w);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<NodeKey>& nodes() const { return nodes_; }
    std::optional<std::uint32_t> find(NodeKey key) const;
    double weight(NodeKey a, NodeKey b) const; // 0 when absent

    // Out-adjacency; for undirected graphs each edge appears on both endpoints.
    const std::map<std::uint32_t, double>& out_edges(std::uint32_t u) const { return out_[u]; }
    const std::map<std::uint32_t, double>& in_edges(std::uint32_t u) const {
        return directed_ ? in_[u] : out_[u];
    }

    double max_edge_weight() const;

private:
    bool directed_;
    std::vector<NodeKey> nodes_;
    std::map<NodeKey, std::uint32_t> index_;
    std::vector<std::map<std::uint32_t, double>> out_;
    std::vector<std::map<std::uint32_t, double>> in_; // directed only
    std::size_t edge_count_ = 0;
};

struct TimeWindow {
    Timestamp start = 0; // inclusive
    Timestamp end = 0;   // inclusive

    bool contains(Timestamp ts) const { return ts >= start && ts <= end; }
};

// Undirected file-file layer; every commit inside the window touching
// 2..max_files distinct identities increments each unordered pair.
WeightedGraph build_cochange_graph(std::span<const CommitRecord> commits,
                                   const FileIdentityMap& ids,
                                   const TimeWindow& window,
                                   std::size_t max_files = 100);

// Undirected author-file layer; weight = commits by the author touching the
// identity inside the window.
WeightedGraph build_authorship_graph(std::span<const CommitRecord> commits,
                                     const FileIdentityMap& ids,
                                     const AuthorDirectory& authors,
                                     const TimeWindow& window);

struct DependencyLoadResult {
    WeightedGraph layer{true};
    std::size_t unresolved = 0;
    std::size_t self_dropped = 0;
};

// CSV `src,dst`; directed, deduplicated; paths resolved against current names.
DependencyLoadResult load_dependency_edges(std::istream& in, const FileIdentityMap& ids);

struct ImportScanResult {
    std::vector<std::pair<std::string, std::string>> edges; // importer, imported (root-relative)
    std::size_t unresolved = 0;
    std::size_t unreadable = 0;
};

class LanguageConfig; // code_metrics.hpp

// Coarse fallback when no call-graph export exists: line-pattern import scan.
ImportScanResult scan_imports(const std::filesystem::path& source_root,
                              const LanguageConfig& config);

DependencyLoadResult dependency_from_paths(const ImportScanResult& scan,
                                           const FileIdentityMap& ids);

// combined = sum_i multiplier_i * layer_i with the directed dependency layer
// symmetrized by adding its transpose. When normalize_layers is set each
// layer is first scaled by 1/max edge weight so no layer dominates.
WeightedGraph combine_networks(const WeightedGraph& dependency,
                               const WeightedGraph& cochange,
                               const WeightedGraph& authorship,
                               const std::array<double, 3>& multipliers = {1.0, 1.0, 1.0},
                               bool normalize_layers = true);

// Edge-list export `layer,src,dst,weight`; node labels are current paths /
// author names. Undirected edges are written once with src <= dst.
void export_edge_list(std::ostream& out, const WeightedGraph& g, std::string_view layer_name,
                      const FileIdentityMap& ids, const AuthorDirectory& authors);

} // namespace decaymap
