#include "decaymap/centrality.hpp"

#include "decaymap/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace decaymap {

namespace {

// y = A^T x, i.e. y[v] accumulates w(u->v) * x[u].
void transpose_multiply(const WeightedGraph& g, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::uint32_t u = 0; u < g.node_count(); ++u)
        for (const auto& [v, w] : g.out_edges(u)) y[v] += w * x[u];
}

void forward_multiply(const WeightedGraph& g, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::uint32_t u = 0; u < g.node_count(); ++u)
        for (const auto& [v, w] : g.out_edges(u)) y[u] += w * x[v];
}

} // namespace

double estimate_spectral_radius(const WeightedGraph& g, int steps) {
    const std::size_t n = g.node_count();
    if (n == 0 || g.edge_count() == 0) return 0.0;

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> av(n);
    double norm = 0.0;
    for (int it = 0; it < steps; ++it) {
        forward_multiply(g, v, av);
        norm = std::sqrt(std::inner_product(av.begin(), av.end(), av.begin(), 0.0));
        if (norm == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = av[i] / norm;
    }
    return norm;
}

double default_katz_alpha(const WeightedGraph& g, double frac) {
    double rho = estimate_spectral_radius(g);
    if (rho <= 0.0) return frac; // edgeless graph: any alpha converges
    return frac / rho;
}

CentralityScores katz_centrality(const WeightedGraph& g, const KatzParams& params) {
    if (!(params.alpha > 0)) throw Error("katz_centrality: alpha must be positive");
    if (!(params.beta > 0)) throw Error("katz_centrality: beta must be positive");

    const std::size_t n = g.node_count();
    CentralityScores out;
    out.method = CentralityMethod::katz;
    out.alpha_or_damping = params.alpha;
    out.normalized = true;
    if (n == 0) return out;

    double rho = estimate_spectral_radius(g);
    if (rho > 0 && params.alpha >= 1.0 / rho)
        throw Error("katz_centrality: alpha " + format_double(params.alpha) +
                    " is at or above 1/spectral-radius estimate " + format_double(1.0 / rho) +
                    "; choose a smaller alpha");

    std::vector<double> x(n, params.beta);
    std::vector<double> ax(n);
    double residual = 0.0;
    bool converged = false;
    for (int it = 0; it < params.max_iter; ++it) {
        transpose_multiply(g, x, ax);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double next = params.alpha * ax[i] + params.beta;
            residual = std::max(residual, std::fabs(next - x[i]));
            x[i] = next;
        }
        if (residual <= params.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw Error("katz_centrality: no convergence after " + std::to_string(params.max_iter) +
                    " iterations, residual " + format_double(residual));

    double mx = *std::max_element(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) out.scores[g.nodes()[i]] = x[i] / mx;
    return out;
}

CentralityScores pagerank(const WeightedGraph& g, const PageRankParams& params) {
    if (!(params.damping > 0 && params.damping < 1))
        throw Error("pagerank: damping must lie in (0,1)");

    const std::size_t n = g.node_count();
    CentralityScores out;
    out.method = CentralityMethod::pagerank;
    out.alpha_or_damping = params.damping;
    out.normalized = false;
    if (n == 0) return out;

    std::vector<double> out_weight(n, 0.0);
    for (std::uint32_t u = 0; u < n; ++u)
        for (const auto& [v, w] : g.out_edges(u)) out_weight[u] += w;

    const double d = params.damping;
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    bool converged = false;
    double delta = 0.0;
    for (int it = 0; it < params.max_iter; ++it) {
        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (out_weight[u] == 0.0) dangling += x[u];

        double base = (1.0 - d) / static_cast<double>(n) + d * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (std::uint32_t u = 0; u < n; ++u) {
            if (out_weight[u] == 0.0) continue;
            double share = d * x[u] / out_weight[u];
            for (const auto& [v, w] : g.out_edges(u)) next[v] += share * w;
        }
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
        x.swap(next);
        if (delta <= params.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw Error("pagerank: no convergence after " + std::to_string(params.max_iter) +
                    " iterations, residual " + format_double(delta));

    for (std::size_t i = 0; i < n; ++i) out.scores[g.nodes()[i]] = x[i];
    return out;
}

std::map<NodeKey, DegreeStats> degree_stats(const WeightedGraph& g) {
    std::map<NodeKey, DegreeStats> out;
    for (std::uint32_t u = 0; u < g.node_count(); ++u) {
        DegreeStats st;
        st.out_degree = static_cast<std::uint32_t>(g.out_edges(u).size());
        for (const auto& [v, w] : g.out_edges(u)) st.weighted_degree += w;
        if (g.directed()) {
            st.in_degree = static_cast<std::uint32_t>(g.in_edges(u).size());
            for (const auto& [v, w] : g.in_edges(u)) st.weighted_degree += w;
        } else {
            st.in_degree = st.out_degree;
        }
        out[g.nodes()[u]] = st;
    }
    return out;
}

} // namespace decaymap
