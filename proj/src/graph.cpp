#include "gad/graph.hpp"

#include "gad/error.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace gad {

namespace {

void validate_relation(const CsrAdjacency& adj, NodeId num_nodes, std::size_t rel_index) {
    const std::string where = "relation " + std::to_string(rel_index);
    if (adj.offsets.size() != static_cast<std::size_t>(num_nodes) + 1) {
        throw ValidationError(where + ": offsets size " + std::to_string(adj.offsets.size()) +
                              " does not match num_nodes + 1");
    }
    if (adj.offsets.front() != 0) {
        throw ValidationError(where + ": offsets must start at 0");
    }
    for (std::size_t i = 1; i < adj.offsets.size(); ++i) {
        if (adj.offsets[i] < adj.offsets[i - 1]) {
            throw ValidationError(where + ": offsets decrease at row " + std::to_string(i - 1));
        }
    }
    if (adj.offsets.back() != static_cast<std::int64_t>(adj.columns.size())) {
        throw ValidationError(where + ": last offset " + std::to_string(adj.offsets.back()) +
                              " does not equal column count " + std::to_string(adj.columns.size()));
    }
    for (NodeId i = 0; i < num_nodes; ++i) {
        auto row = adj.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] < 0 || row[k] >= num_nodes) {
                throw ValidationError(where + ": column index " + std::to_string(row[k]) +
                                      " out of range in row " + std::to_string(i));
            }
            if (k > 0 && row[k] <= row[k - 1]) {
                throw ValidationError(where + ": row " + std::to_string(i) +
                                      " is not strictly increasing");
            }
        }
    }
}

void validate_symmetric(const CsrAdjacency& adj, NodeId num_nodes, std::size_t rel_index) {
    for (NodeId i = 0; i < num_nodes; ++i) {
        for (NodeId j : adj.row(i)) {
            auto back = adj.row(j);
            if (!std::binary_search(back.begin(), back.end(), i)) {
                throw ValidationError("relation " + std::to_string(rel_index) +
                                      ": undirected adjacency is not symmetric at edge " +
                                      std::to_string(i) + "-" + std::to_string(j));
            }
        }
    }
}

CsrAdjacency csr_from_pairs(std::vector<std::pair<NodeId, NodeId>>& pairs, NodeId num_nodes) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    CsrAdjacency adj;
    adj.offsets.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
    adj.columns.resize(pairs.size());
    for (const auto& [src, dst] : pairs) {
        ++adj.offsets[static_cast<std::size_t>(src) + 1];
    }
    for (std::size_t i = 1; i < adj.offsets.size(); ++i) {
        adj.offsets[i] += adj.offsets[i - 1];
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        adj.columns[k] = pairs[k].second; // pairs sorted by (src, dst): rows are contiguous
    }
    return adj;
}

} // namespace

Graph::Graph(NodeId num_nodes, std::vector<CsrAdjacency> relations, bool directed)
    : num_nodes_(num_nodes), relations_(std::move(relations)), directed_(directed) {
    if (num_nodes_ < 0) throw ValidationError("num_nodes must be non-negative");
    if (relations_.empty()) throw ValidationError("graph needs at least one relation");
    for (std::size_t r = 0; r < relations_.size(); ++r) {
        validate_relation(relations_[r], num_nodes_, r);
        if (!directed_) validate_symmetric(relations_[r], num_nodes_, r);
    }
}

std::int64_t Graph::num_entries() const {
    std::int64_t total = 0;
    for (const auto& rel : relations_) total += rel.num_entries();
    return total;
}

std::vector<EdgeTriple> Graph::edge_list() const {
    std::vector<EdgeTriple> edges;
    for (std::size_t r = 0; r < relations_.size(); ++r) {
        const auto& adj = relations_[r];
        for (NodeId i = 0; i < num_nodes_; ++i) {
            for (NodeId j : adj.row(i)) {
                if (!directed_ && j < i) continue; // undirected: emit i <= j once
                edges.push_back({i, j, static_cast<std::int32_t>(r)});
            }
        }
    }
    return edges;
}

Graph build_csr(std::span<const EdgeTriple> edges, NodeId num_nodes, std::int32_t num_relations,
                bool directed) {
    if (num_nodes < 0) throw ValidationError("num_nodes must be non-negative");
    if (num_relations < 1) throw ValidationError("num_relations must be at least 1");

    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        if (edge.src < 0 || edge.src >= num_nodes || edge.dst < 0 || edge.dst >= num_nodes) {
            throw ValidationError("endpoint out of range at edge " + std::to_string(e) + ": (" +
                                  std::to_string(edge.src) + ", " + std::to_string(edge.dst) +
                                  "), num_nodes = " + std::to_string(num_nodes));
        }
        if (edge.rel < 0 || edge.rel >= num_relations) {
            throw ValidationError("relation out of range at edge " + std::to_string(e) + ": " +
                                  std::to_string(edge.rel) + ", num_relations = " +
                                  std::to_string(num_relations));
        }
    }

    std::vector<std::vector<std::pair<NodeId, NodeId>>> per_rel(
        static_cast<std::size_t>(num_relations));
    for (const auto& edge : edges) {
        auto& pairs = per_rel[static_cast<std::size_t>(edge.rel)];
        pairs.emplace_back(edge.src, edge.dst);
        if (!directed && edge.src != edge.dst) pairs.emplace_back(edge.dst, edge.src);
    }

    std::vector<CsrAdjacency> relations;
    relations.reserve(per_rel.size());
    for (auto& pairs : per_rel) {
        relations.push_back(csr_from_pairs(pairs, num_nodes));
    }
    return Graph(num_nodes, std::move(relations), directed);
}

Graph merged_view(const Graph& graph) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(static_cast<std::size_t>(graph.num_entries()));
    for (std::size_t r = 0; r < graph.num_relations(); ++r) {
        const auto& adj = graph.relation(r);
        for (NodeId i = 0; i < graph.num_nodes(); ++i) {
            for (NodeId j : adj.row(i)) pairs.emplace_back(i, j);
        }
    }
    std::vector<CsrAdjacency> merged;
    merged.push_back(csr_from_pairs(pairs, graph.num_nodes()));
    return Graph(graph.num_nodes(), std::move(merged), graph.directed());
}

CsrAdjacency transposed(const CsrAdjacency& adj, NodeId num_nodes) {
    CsrAdjacency out;
    out.offsets.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
    out.columns.resize(static_cast<std::size_t>(adj.num_entries()));
    for (NodeId j : adj.columns) {
        ++out.offsets[static_cast<std::size_t>(j) + 1];
    }
    for (std::size_t i = 1; i < out.offsets.size(); ++i) {
        out.offsets[i] += out.offsets[i - 1];
    }
    std::vector<std::int64_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
    for (NodeId i = 0; i < num_nodes; ++i) {
        for (NodeId j : adj.row(i)) {
            out.columns[static_cast<std::size_t>(cursor[static_cast<std::size_t>(j)]++)] = i;
        }
    }
    // Rows come out sorted because sources are visited in increasing order.
    return out;
}

} // namespace gad
