#include "gad/aggregate.hpp"

#include "gad/error.hpp"
#include "gad/parallel.hpp"

#include <algorithm>
#include <cstring>

namespace gad {

namespace {

// Pools rows of src into dst for nodes in [begin, end), reading each node's
// neighbor list from adj. Neighbors are accumulated in CSR (left-to-right)
// order, so the result does not depend on the worker partition.
void pool_rows(const CsrAdjacency& adj, const double* src, double* dst, std::int32_t dim,
               AggKind kind, NodeId begin, NodeId end) {
    for (NodeId i = begin; i < end; ++i) {
        double* out = dst + static_cast<std::size_t>(i) * dim;
        const auto neigh = adj.row(i);
        if (neigh.empty()) {
            std::memset(out, 0, sizeof(double) * static_cast<std::size_t>(dim));
            continue;
        }
        const double* first = src + static_cast<std::size_t>(neigh[0]) * dim;
        std::memcpy(out, first, sizeof(double) * static_cast<std::size_t>(dim));
        for (std::size_t k = 1; k < neigh.size(); ++k) {
            const double* row = src + static_cast<std::size_t>(neigh[k]) * dim;
            if (kind == AggKind::max) {
                for (std::int32_t j = 0; j < dim; ++j) out[j] = std::max(out[j], row[j]);
            } else {
                for (std::int32_t j = 0; j < dim; ++j) out[j] += row[j];
            }
        }
        if (kind == AggKind::mean) {
            const double inv = 1.0 / static_cast<double>(neigh.size());
            for (std::int32_t j = 0; j < dim; ++j) out[j] *= inv;
        }
    }
}

// Neighbor set used by aggregation: the stored adjacency for undirected
// graphs, its transpose (in-edges) for directed ones.
CsrAdjacency pooling_adjacency(const Graph& graph) {
    if (graph.num_relations() != 1) {
        throw ValidationError("aggregation expects a single-relation graph; apply merged_view "
                              "first (got " + std::to_string(graph.num_relations()) +
                              " relations)");
    }
    if (graph.directed()) return transposed(graph.relation(0), graph.num_nodes());
    return graph.relation(0);
}

void check_dims(const Graph& graph, const FeatureMatrix& features) {
    if (features.num_nodes() != graph.num_nodes()) {
        throw ValidationError("feature rows " + std::to_string(features.num_nodes()) +
                              " do not match graph nodes " + std::to_string(graph.num_nodes()));
    }
}

} // namespace

std::string to_string(AggKind kind) {
    switch (kind) {
        case AggKind::mean: return "mean";
        case AggKind::sum: return "sum";
        case AggKind::max: return "max";
    }
    return "mean";
}

AggKind agg_kind_from_string(const std::string& name) {
    if (name == "mean") return AggKind::mean;
    if (name == "sum") return AggKind::sum;
    if (name == "max") return AggKind::max;
    throw ValidationError("unknown aggregation kind '" + name + "' (expected mean, sum, or max)");
}

FeatureMatrix aggregate_once(const Graph& graph, const FeatureMatrix& features, AggKind kind) {
    check_dims(graph, features);
    const CsrAdjacency adj = pooling_adjacency(graph);
    const std::int32_t dim = features.dim();
    FeatureMatrix out(features.num_nodes(), dim);
    double* dst = out.row(0).data();
    const double* src = features.num_nodes() > 0 ? features.row(0).data() : nullptr;
    parallel_for(features.num_nodes(), [&](std::int64_t begin, std::int64_t end) {
        pool_rows(adj, src, dst, dim, kind, static_cast<NodeId>(begin), static_cast<NodeId>(end));
    });
    return out;
}

StackedFeatures stack(const Graph& graph, const FeatureMatrix& features, std::int32_t layers,
                      AggKind kind) {
    check_dims(graph, features);
    if (layers < 0) throw ValidationError("layer count must be non-negative");

    const NodeId n = features.num_nodes();
    const std::int32_t d = features.dim();
    const std::int32_t wide = d * (layers + 1);

    StackedFeatures stacked{FeatureMatrix(n, wide), d, layers + 1};
    double* base = n > 0 ? stacked.values.row(0).data() : nullptr;

    // Block 0 is a verbatim copy of the input.
    parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            std::memcpy(base + static_cast<std::size_t>(i) * wide, features.row(static_cast<NodeId>(i)).data(),
                        sizeof(double) * static_cast<std::size_t>(d));
        }
    });
    if (layers == 0) return stacked;

    const CsrAdjacency adj = pooling_adjacency(graph);

    // Layer l reads block l-1 and writes block l. Blocks live strided inside
    // the wide rows, so each layer works on a compact N x d scratch pair to
    // keep the pooling loops contiguous.
    std::vector<double> prev(static_cast<std::size_t>(n) * d);
    std::vector<double> next(static_cast<std::size_t>(n) * d);
    parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            std::memcpy(prev.data() + static_cast<std::size_t>(i) * d,
                        base + static_cast<std::size_t>(i) * wide,
                        sizeof(double) * static_cast<std::size_t>(d));
        }
    });
    for (std::int32_t l = 1; l <= layers; ++l) {
        parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
            pool_rows(adj, prev.data(), next.data(), d, kind, static_cast<NodeId>(begin),
                      static_cast<NodeId>(end));
            for (std::int64_t i = begin; i < end; ++i) {
                std::memcpy(base + static_cast<std::size_t>(i) * wide +
                                static_cast<std::size_t>(l) * d,
                            next.data() + static_cast<std::size_t>(i) * d,
                            sizeof(double) * static_cast<std::size_t>(d));
            }
        });
        std::swap(prev, next);
    }
    return stacked;
}

} // namespace gad
