#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gad {

using NodeId = std::int32_t;

struct EdgeTriple {
    NodeId src = 0;
    NodeId dst = 0;
    std::int32_t rel = 0;

    friend bool operator==(const EdgeTriple&, const EdgeTriple&) = default;
};

// One relation stored as CSR: row offsets (num_nodes + 1 entries) plus the
// concatenated, per-row sorted and deduplicated column indices.
struct CsrAdjacency {
    std::vector<std::int64_t> offsets;
    std::vector<NodeId> columns;

    std::int64_t num_entries() const { return offsets.empty() ? 0 : offsets.back(); }

    std::span<const NodeId> row(NodeId i) const {
        return {columns.data() + offsets[static_cast<std::size_t>(i)],
                columns.data() + offsets[static_cast<std::size_t>(i) + 1]};
    }

    std::int64_t degree(NodeId i) const {
        return offsets[static_cast<std::size_t>(i) + 1] - offsets[static_cast<std::size_t>(i)];
    }

    friend bool operator==(const CsrAdjacency&, const CsrAdjacency&) = default;
};

// Immutable multi-relation sparse graph. Undirected graphs store every edge
// in both directions; directed graphs store out-edges (row i holds the
// targets of i's out-going edges). Validation runs once at construction,
// after which concurrent reads are safe.
class Graph {
public:
    Graph(NodeId num_nodes, std::vector<CsrAdjacency> relations, bool directed);

    NodeId num_nodes() const { return num_nodes_; }
    std::size_t num_relations() const { return relations_.size(); }
    bool directed() const { return directed_; }

    const CsrAdjacency& relation(std::size_t r) const { return relations_[r]; }

    std::span<const NodeId> neighbors(NodeId i, std::size_t r = 0) const {
        return relations_[r].row(i);
    }

    std::int64_t degree(NodeId i, std::size_t r = 0) const { return relations_[r].degree(i); }

    // Total stored CSR entries over all relations.
    std::int64_t num_entries() const;

    // Canonical edge list: one triple per stored directed entry, except that
    // undirected graphs emit each edge once with src <= dst. Feeding the
    // result back through build_csr reproduces this graph exactly.
    std::vector<EdgeTriple> edge_list() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    NodeId num_nodes_ = 0;
    std::vector<CsrAdjacency> relations_;
    bool directed_ = false;
};

// Builds a validated Graph from an arbitrary edge list. Duplicate edges are
// collapsed, self-loops kept as given, rows sorted; undirected graphs get
// both directions of every edge. Throws ValidationError naming the offending
// edge index when an endpoint or relation id is out of range.
Graph build_csr(std::span<const EdgeTriple> edges, NodeId num_nodes, std::int32_t num_relations,
                bool directed);

// Single-relation graph over the deduplicated union of all relations'
// edge sets. Directedness is preserved.
Graph merged_view(const Graph& graph);

// In-adjacency of a relation: row i lists the sources of edges into i.
// For symmetric (undirected) adjacency this is a copy.
CsrAdjacency transposed(const CsrAdjacency& adj, NodeId num_nodes);

} // namespace gad
