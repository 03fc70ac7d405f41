// Test-only reference implementations: dense linear-algebra oracles for the
// sparse aggregation path and brute-force metric definitions. Deliberately
// naive and independent of the library's code paths.
#pragma once

#include "gad/aggregate.hpp"
#include "gad/graph.hpp"
#include "gad/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Dense pooling matrix matching the library's neighbor semantics: row i
// holds 1 for every node whose features node i pools (in-neighbors when
// directed, adjacent nodes otherwise).
inline Dense dense_adjacency(const gad::Graph& graph) {
    const auto n = static_cast<std::size_t>(graph.num_nodes());
    Dense a(n, std::vector<double>(n, 0.0));
    for (gad::NodeId j = 0; j < graph.num_nodes(); ++j) {
        for (gad::NodeId i : graph.neighbors(j)) {
            if (graph.directed()) {
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1.0; // edge j -> i
            } else {
                a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1.0;
            }
        }
    }
    return a;
}

inline Dense to_dense(const gad::FeatureMatrix& x) {
    Dense m(static_cast<std::size_t>(x.num_nodes()),
            std::vector<double>(static_cast<std::size_t>(x.dim()), 0.0));
    for (gad::NodeId i = 0; i < x.num_nodes(); ++i) {
        for (std::int32_t j = 0; j < x.dim(); ++j) {
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x(i, j);
        }
    }
    return m;
}

// A @ X
inline Dense matmul(const Dense& a, const Dense& x) {
    const std::size_t n = a.size();
    const std::size_t d = x.empty() ? 0 : x[0].size();
    Dense out(n, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) out[i][j] += a[i][k] * x[k][j];
        }
    }
    return out;
}

// D^-1 A X with zero rows for degree-0 nodes.
inline Dense mean_oracle(const Dense& a, const Dense& x) {
    Dense out = matmul(a, x);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double deg = std::accumulate(a[i].begin(), a[i].end(), 0.0);
        for (double& v : out[i]) v = deg > 0.0 ? v / deg : 0.0;
    }
    return out;
}

// Elementwise max over pooled rows, zero where the pooled set is empty.
inline Dense max_oracle(const Dense& a, const Dense& x) {
    const std::size_t n = a.size();
    const std::size_t d = x.empty() ? 0 : x[0].size();
    Dense out(n, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) {
                out[i][j] = any ? std::max(out[i][j], x[k][j]) : x[k][j];
            }
            any = true;
        }
    }
    return out;
}

// Exhaustive Mann-Whitney pair counting, ties worth one half.
inline double auroc_bruteforce(const std::vector<double>& scores,
                               const std::vector<std::int32_t>& labels) {
    double won = 0.0;
    std::int64_t pairs = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (labels[p] != 1) continue;
        for (std::size_t q = 0; q < scores.size(); ++q) {
            if (labels[q] != 0) continue;
            ++pairs;
            if (scores[p] > scores[q]) won += 1.0;
            else if (scores[p] == scores[q]) won += 0.5;
        }
    }
    return won / static_cast<double>(pairs);
}

// Definitional AP: precision and recall recounted from scratch at each
// distinct threshold, descending.
inline double ap_bruteforce(const std::vector<double>& scores,
                            const std::vector<std::int32_t>& labels) {
    std::vector<double> thresholds = scores;
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double total_pos =
        static_cast<double>(std::count(labels.begin(), labels.end(), std::int32_t{1}));
    double ap = 0.0;
    double prev_recall = 0.0;
    for (double t : thresholds) {
        std::int64_t predicted = 0;
        std::int64_t true_pos = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) {
                ++predicted;
                if (labels[i] == 1) ++true_pos;
            }
        }
        const double precision = static_cast<double>(true_pos) / static_cast<double>(predicted);
        const double recall = static_cast<double>(true_pos) / total_pos;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

// Top-k hit counting with the (score desc, index asc) order.
inline double topk_positives(const std::vector<double>& scores,
                             const std::vector<std::int32_t>& labels, std::int64_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < k; ++i) hits += labels[order[static_cast<std::size_t>(i)]];
    return static_cast<double>(hits);
}

// Uniform random test graph; single relation, optionally directed.
inline gad::Graph random_graph(gad::Rng& rng, gad::NodeId max_nodes, bool directed,
                               double density = 0.15) {
    const auto n = static_cast<gad::NodeId>(rng.next_int(1, max_nodes));
    const auto max_edges = static_cast<std::int64_t>(
        density * static_cast<double>(n) * static_cast<double>(n) + 1.0);
    const auto m = rng.next_int(0, max_edges);
    std::vector<gad::EdgeTriple> edges;
    for (std::int64_t e = 0; e < m; ++e) {
        edges.push_back({static_cast<gad::NodeId>(rng.next_below(static_cast<std::uint64_t>(n))),
                         static_cast<gad::NodeId>(rng.next_below(static_cast<std::uint64_t>(n))),
                         0});
    }
    return gad::build_csr(edges, n, 1, directed);
}

inline gad::FeatureMatrix random_features(gad::Rng& rng, gad::NodeId n, std::int32_t dim) {
    gad::FeatureMatrix x(n, dim);
    for (gad::NodeId i = 0; i < n; ++i) {
        for (std::int32_t j = 0; j < dim; ++j) x(i, j) = rng.next_uniform(-3.0, 3.0);
    }
    return x;
}

} // namespace oracle
