#include "gad/datagen.hpp"

#include "gad/aggregate.hpp"
#include "gad/error.hpp"
#include "gad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace gad {

namespace {

// Substream tags so each part of the recipe owns an independent RNG.
enum : std::uint64_t { kEdgeStream = 1, kFeatureStream, kDirectionStream, kPickStream, kNoiseStream };

std::vector<double> random_unit_vector(std::int32_t dim, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& x : v) {
            x = rng.next_normal();
            norm_sq += x * x;
        }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
    return v;
}

// G(N, p) sampled by geometric gaps over the linearized strict upper
// triangle, O(expected edges) instead of O(N^2).
std::vector<EdgeTriple> sample_gnp_edges(NodeId n, double p, Rng& rng) {
    std::vector<EdgeTriple> edges;
    if (p <= 0.0 || n < 2) return edges;
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    if (p >= 1.0) {
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = i + 1; j < n; ++j) edges.push_back({i, j, 0});
        }
        return edges;
    }
    edges.reserve(static_cast<std::size_t>(p * total * 1.1) + 16);
    const double log_q = std::log1p(-p);
    double pos = -1.0;
    while (true) {
        double u = rng.next_double();
        while (u <= 0.0) u = rng.next_double();
        pos += 1.0 + std::floor(std::log(u) / log_q);
        if (!(pos < total)) break;
        // Invert t = i*n - i*(i+1)/2 + (j - i - 1) for row i, column j > i.
        const double t = pos;
        auto i = static_cast<std::int64_t>(
            static_cast<double>(n) - 2.0 -
            std::floor(std::sqrt(4.0 * static_cast<double>(n) * static_cast<double>(n - 1) -
                                 8.0 * t - 7.0) /
                           2.0 -
                       0.5));
        auto row_start = [&](std::int64_t r) {
            return r * static_cast<std::int64_t>(n) - r * (r + 1) / 2;
        };
        if (i < 0) i = 0;
        while (i > 0 && row_start(i) > static_cast<std::int64_t>(t)) --i;
        while (row_start(i + 1) <= static_cast<std::int64_t>(t)) ++i;
        const auto j = static_cast<std::int64_t>(t) - row_start(i) + i + 1;
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 0});
    }
    return edges;
}

std::string join_direction(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

} // namespace

std::string to_string(GenMechanism mechanism) {
    return mechanism == GenMechanism::feature_only ? "feature-only" : "neighborhood";
}

GenMechanism mechanism_from_string(const std::string& name) {
    if (name == "feature-only") return GenMechanism::feature_only;
    if (name == "neighborhood") return GenMechanism::neighborhood;
    throw ValidationError("unknown mechanism '" + name +
                          "' (expected feature-only or neighborhood)");
}

void validate_spec(const GenSpec& spec) {
    if (spec.num_nodes < 2) throw ValidationError("num_nodes must be at least 2");
    if (!(spec.avg_degree > 0.0)) throw ValidationError("avg_degree must be positive");
    if (spec.dim < 1) throw ValidationError("dim must be at least 1");
    if (!(spec.anomaly_ratio > 0.0) || spec.anomaly_ratio > 0.25) {
        throw ValidationError("anomaly_ratio must be in (0, 0.25]: datasets keep at most a 25% "
                              "anomaly ratio");
    }
    if (spec.noise < 0.0 || spec.noise > 1.0) {
        throw ValidationError("noise must be in [0, 1]");
    }
    const auto anomalies =
        static_cast<std::int64_t>(std::floor(spec.anomaly_ratio * spec.num_nodes));
    const auto max_possible = static_cast<std::int64_t>(std::floor(0.25 * spec.num_nodes));
    if (anomalies < 100 && max_possible >= 100) {
        throw ValidationError("anomaly count " + std::to_string(anomalies) +
                              " is below the 100-anomaly selection rule; raise anomaly_ratio (a "
                              "graph of " + std::to_string(spec.num_nodes) + " nodes permits it)");
    }
}

Dataset generate(const GenSpec& spec) {
    validate_spec(spec);
    const NodeId n = spec.num_nodes;
    const std::int32_t d = spec.dim;
    const auto num_anomalies =
        static_cast<std::int64_t>(std::floor(spec.anomaly_ratio * static_cast<double>(n)));
    if (num_anomalies < 2) {
        throw ValidationError("degenerate label distribution: fewer than 2 anomalies");
    }

    Rng edge_rng(derive_seed(spec.seed, kEdgeStream));
    Rng feature_rng(derive_seed(spec.seed, kFeatureStream));
    Rng direction_rng(derive_seed(spec.seed, kDirectionStream));
    Rng pick_rng(derive_seed(spec.seed, kPickStream));
    Rng noise_rng(derive_seed(spec.seed, kNoiseStream));

    const double p = std::min(1.0, spec.avg_degree / static_cast<double>(n - 1));
    const auto edges = sample_gnp_edges(n, p, edge_rng);
    Graph graph = build_csr(edges, n, 1, /*directed=*/false);

    FeatureMatrix features(n, d);
    for (NodeId i = 0; i < n; ++i) {
        for (std::int32_t j = 0; j < d; ++j) features(i, j) = feature_rng.next_normal();
    }

    const std::vector<double> direction = random_unit_vector(d, direction_rng);
    std::vector<Label> labels(static_cast<std::size_t>(n), Label::normal);

    if (spec.mechanism == GenMechanism::feature_only) {
        // Mean shift of 10 along the hidden direction: the two classes are
        // far enough apart that the label is a clean function of x.
        constexpr double kShift = 10.0;
        std::vector<NodeId> ids(static_cast<std::size_t>(n));
        std::iota(ids.begin(), ids.end(), NodeId{0});
        for (std::int64_t k = 0; k < num_anomalies; ++k) {
            const auto j = static_cast<std::size_t>(
                pick_rng.next_int(k, static_cast<std::int64_t>(n) - 1));
            std::swap(ids[static_cast<std::size_t>(k)], ids[j]);
        }
        for (std::int64_t k = 0; k < num_anomalies; ++k) {
            const NodeId a = ids[static_cast<std::size_t>(k)];
            for (std::int32_t j = 0; j < d; ++j) {
                features(a, j) += kShift * direction[static_cast<std::size_t>(j)];
            }
            labels[static_cast<std::size_t>(a)] = Label::anomalous;
        }
    } else {
        // Hidden score: projection of the 1-hop neighbor mean onto the
        // direction; the top floor(ratio*N) scores become anomalies
        // (empirical (1 - ratio) quantile threshold, ties by node id).
        const FeatureMatrix neighbor_mean = aggregate_once(graph, features, AggKind::mean);
        std::vector<double> hidden(static_cast<std::size_t>(n), 0.0);
        for (NodeId i = 0; i < n; ++i) {
            const auto row = neighbor_mean.row(i);
            double dot = 0.0;
            for (std::int32_t j = 0; j < d; ++j) dot += row[j] * direction[static_cast<std::size_t>(j)];
            hidden[static_cast<std::size_t>(i)] = dot;
        }
        std::vector<NodeId> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), NodeId{0});
        std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
            if (hidden[static_cast<std::size_t>(a)] != hidden[static_cast<std::size_t>(b)]) {
                return hidden[static_cast<std::size_t>(a)] > hidden[static_cast<std::size_t>(b)];
            }
            return a < b;
        });
        for (std::int64_t k = 0; k < num_anomalies; ++k) {
            labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = Label::anomalous;
        }
    }

    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (noise_rng.next_double() < spec.noise) {
            labels[i] = labels[i] == Label::anomalous ? Label::normal : Label::anomalous;
        }
    }

    Dataset dataset{std::move(graph),
                    std::move(features),
                    LabelTable(std::move(labels)),
                    spec.name.empty()
                        ? "synthetic-" + to_string(spec.mechanism) + "-n" + std::to_string(n) +
                              "-seed" + std::to_string(spec.seed)
                        : spec.name,
                    {},
                    {}};
    dataset.meta["generator"] = "gad-datagen";
    dataset.meta["mechanism"] = to_string(spec.mechanism);
    dataset.meta["avg_degree"] = format_double(spec.avg_degree);
    dataset.meta["anomaly_ratio"] = format_double(spec.anomaly_ratio);
    dataset.meta["noise"] = format_double(spec.noise);
    dataset.meta["seed"] = std::to_string(spec.seed);
    dataset.meta[kHiddenDirectionKey] = join_direction(direction);
    validate_dataset(dataset);
    return dataset;
}

} // namespace gad
