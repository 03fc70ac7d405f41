#pragma once

#include "gad/dataset.hpp"
#include "gad/graph.hpp"

#include <cstdint>
#include <string>

namespace gad {

enum class AggKind { mean, sum, max };

std::string to_string(AggKind kind);
AggKind agg_kind_from_string(const std::string& name);

// [h0 || h1 || ... || hL] stored as one dense N x base_dim*(L+1) matrix.
// Block 0 equals the input features exactly.
struct StackedFeatures {
    FeatureMatrix values;
    std::int32_t base_dim = 0;
    std::int32_t num_blocks = 0; // L + 1

    std::int32_t layers() const { return num_blocks - 1; }
};

// One round of parameter-free neighbor pooling. Row i pools the feature rows
// of i's neighbor set: for undirected graphs the adjacent nodes, for directed
// graphs the in-neighbors (sources of edges into i). Self is excluded unless
// a self-loop edge exists. Degree-0 rows come out all-zero for every kind.
// The graph must be single-relation; pass merged_view first otherwise.
FeatureMatrix aggregate_once(const Graph& graph, const FeatureMatrix& features, AggKind kind);

// h0 = features, hl = aggregate_once(graph, h(l-1), kind) for l = 1..L,
// concatenated in block order. L = 0 returns the input alone.
StackedFeatures stack(const Graph& graph, const FeatureMatrix& features, std::int32_t layers,
                      AggKind kind);

} // namespace gad
