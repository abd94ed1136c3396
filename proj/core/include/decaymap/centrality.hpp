#pragma once

#include "decaymap/graph.hpp"

#include <map>

namespace decaymap {

enum class CentralityMethod : std::uint8_t { katz, pagerank, degree };

struct CentralityScores {
    std::map<NodeKey, double> scores;
    CentralityMethod method = CentralityMethod::katz;
    double alpha_or_damping = 0;
    bool normalized = false;

    double at(NodeKey key) const {
        auto it = scores.find(key);
        return it == scores.end() ? 0.0 : it->second;
    }
    std::optional<double> find(NodeKey key) const {
        auto it = scores.find(key);
        if (it == scores.end()) return std::nullopt;
        return it->second;
    }
};

// Power-iteration estimate of the spectral radius; 0 for edgeless graphs.
double estimate_spectral_radius(const WeightedGraph& g, int steps = 100);

struct KatzParams {
    double alpha;            // must lie in (0, 1/spectral radius)
    double beta = 1.0;
    double tol = 1e-10;      // max-norm fixed point tolerance
    int max_iter = 10000;
};

// alpha scaled against a fresh spectral-radius estimate; frac defaults to 0.5.
double default_katz_alpha(const WeightedGraph& g, double frac = 0.5);

// Fixed point of x = alpha*A^T*x + beta*1, then divided by its maximum entry
// so scores land in (0, 1].
CentralityScores katz_centrality(const WeightedGraph& g, const KatzParams& params);

struct PageRankParams {
    double damping = 0.85;
    double tol = 1e-10;      // L1 change per iteration
    int max_iter = 10000;
};

// Stationary vector summing to 1; dangling nodes redistribute uniformly.
CentralityScores pagerank(const WeightedGraph& g, const PageRankParams& params = {});

struct DegreeStats {
    std::uint32_t in_degree = 0;
    std::uint32_t out_degree = 0;
    double weighted_degree = 0; // sum of incident edge weights (in + out when directed)
};

std::map<NodeKey, DegreeStats> degree_stats(const WeightedGraph& g);

} // namespace decaymap
