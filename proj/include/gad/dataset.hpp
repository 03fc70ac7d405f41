#pragma once

#include "gad/graph.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gad {

// Dense row-major feature matrix; row i is node i's feature vector.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(NodeId num_nodes, std::int32_t dim)
        : num_nodes_(num_nodes), dim_(dim),
          values_(static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(dim), 0.0) {}
    FeatureMatrix(NodeId num_nodes, std::int32_t dim, std::vector<double> values);

    NodeId num_nodes() const { return num_nodes_; }
    std::int32_t dim() const { return dim_; }

    std::span<const double> row(NodeId i) const {
        return {values_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<double> row(NodeId i) {
        return {values_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }

    double operator()(NodeId i, std::int32_t j) const {
        return values_[static_cast<std::size_t>(i) * dim_ + static_cast<std::size_t>(j)];
    }
    double& operator()(NodeId i, std::int32_t j) {
        return values_[static_cast<std::size_t>(i) * dim_ + static_cast<std::size_t>(j)];
    }

    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    NodeId num_nodes_ = 0;
    std::int32_t dim_ = 0;
    std::vector<double> values_;
};

// Throws ValidationError if any entry is NaN or infinite.
void validate_finite(const FeatureMatrix& features, const std::string& context = "features");

enum class Label : std::int8_t { normal = 0, anomalous = 1, unknown = -1 };

// Per-node labels with unknown as a first-class value. A valid table carries
// at least one known positive and one known negative.
class LabelTable {
public:
    LabelTable() = default;
    explicit LabelTable(std::vector<Label> labels);

    std::int64_t size() const { return static_cast<std::int64_t>(labels_.size()); }
    Label label(NodeId i) const { return labels_[static_cast<std::size_t>(i)]; }
    bool known(NodeId i) const { return labels_[static_cast<std::size_t>(i)] != Label::unknown; }

    std::int64_t num_positive() const { return num_positive_; }
    std::int64_t num_negative() const { return num_negative_; }
    std::int64_t num_known() const { return num_positive_ + num_negative_; }

    // Node ids with a known label, in increasing order.
    std::vector<NodeId> known_ids() const;

    friend bool operator==(const LabelTable&, const LabelTable&) = default;

private:
    std::vector<Label> labels_;
    std::int64_t num_positive_ = 0;
    std::int64_t num_negative_ = 0;
};

struct NamedSplit {
    std::vector<NodeId> train;
    std::vector<NodeId> val;
    std::vector<NodeId> test;

    friend bool operator==(const NamedSplit&, const NamedSplit&) = default;
};

struct Dataset {
    Graph graph;
    FeatureMatrix features;
    LabelTable labels;
    std::string name;
    std::map<std::string, std::string> meta;        // provenance key/value pairs
    std::map<std::string, NamedSplit> named_splits; // from splits.json, may be empty

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Checks the cross-container invariants (matching node counts, finite
// features, usable labels). Throws ValidationError on violation.
void validate_dataset(const Dataset& dataset);

// Dataset directory format: meta.json, edges.tsv, features.tsv, labels.tsv,
// optional splits.json. Text, UTF-8, LF line endings. Feature values are
// written with shortest round-trip precision so load(save(ds)) is exact.
Dataset load_dataset(const std::string& directory);
void save_dataset(const Dataset& dataset, const std::string& directory);

// Shortest decimal form that parses back to exactly the same double; the
// precision used by every text serialization in this project.
std::string format_double(double v);

} // namespace gad
