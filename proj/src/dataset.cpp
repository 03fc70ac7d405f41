#include "gad/dataset.hpp"

#include "gad/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <utility>

namespace gad {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v); // shortest round-trip form
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view field, const std::string& file, std::size_t line_no,
               const char* what) {
    T value{};
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw IoError(file + ":" + std::to_string(line_no) + ": malformed " + what + " '" +
                      std::string(field) + "'");
    }
    return value;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing or unreadable file: " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary); // binary: LF line endings everywhere
    if (!out) throw IoError("cannot write file: " + path.string());
    return out;
}

// Reads lines without the trailing newline; tolerates a final CR from foreign
// editors even though the format itself is LF.
bool read_line(std::ifstream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

json parse_json_file(const fs::path& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

} // namespace

FeatureMatrix::FeatureMatrix(NodeId num_nodes, std::int32_t dim, std::vector<double> values)
    : num_nodes_(num_nodes), dim_(dim), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(num_nodes_) * static_cast<std::size_t>(dim_)) {
        throw ValidationError("feature matrix value count " + std::to_string(values_.size()) +
                              " does not match " + std::to_string(num_nodes_) + " x " +
                              std::to_string(dim_));
    }
}

void validate_finite(const FeatureMatrix& features, const std::string& context) {
    const auto& v = features.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k])) {
            throw ValidationError(context + ": non-finite value at node " +
                                  std::to_string(k / static_cast<std::size_t>(features.dim())) +
                                  ", column " +
                                  std::to_string(k % static_cast<std::size_t>(features.dim())));
        }
    }
}

LabelTable::LabelTable(std::vector<Label> labels) : labels_(std::move(labels)) {
    for (Label l : labels_) {
        if (l == Label::anomalous) ++num_positive_;
        else if (l == Label::normal) ++num_negative_;
    }
    if (num_positive_ < 1 || num_negative_ < 1) {
        throw ValidationError("label table needs at least one known positive and one known negative "
                              "(got " + std::to_string(num_positive_) + " positive, " +
                              std::to_string(num_negative_) + " negative)");
    }
}

std::vector<NodeId> LabelTable::known_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(static_cast<std::size_t>(num_known()));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != Label::unknown) ids.push_back(static_cast<NodeId>(i));
    }
    return ids;
}

void validate_dataset(const Dataset& dataset) {
    const NodeId n = dataset.graph.num_nodes();
    if (dataset.features.num_nodes() != n) {
        throw ValidationError("dataset '" + dataset.name + "': feature rows " +
                              std::to_string(dataset.features.num_nodes()) +
                              " != num_nodes " + std::to_string(n));
    }
    if (dataset.labels.size() != n) {
        throw ValidationError("dataset '" + dataset.name + "': label count " +
                              std::to_string(dataset.labels.size()) + " != num_nodes " +
                              std::to_string(n));
    }
    validate_finite(dataset.features, "dataset '" + dataset.name + "' features");
    for (const auto& [split_name, split] : dataset.named_splits) {
        for (const auto* part : {&split.train, &split.val, &split.test}) {
            for (NodeId id : *part) {
                if (id < 0 || id >= n) {
                    throw ValidationError("split '" + split_name + "': node id " +
                                          std::to_string(id) + " out of range");
                }
            }
        }
    }
}

Dataset load_dataset(const std::string& directory) {
    const fs::path dir(directory);

    // meta.json
    const fs::path meta_path = dir / "meta.json";
    json meta = parse_json_file(meta_path);
    for (const char* key : {"num_nodes", "num_relations", "feature_dim", "directed", "name"}) {
        if (!meta.contains(key)) {
            throw IoError(meta_path.string() + ": missing key '" + std::string(key) + "'");
        }
    }
    const auto num_nodes = meta.at("num_nodes").get<std::int64_t>();
    const auto num_relations = meta.at("num_relations").get<std::int32_t>();
    const auto feature_dim = meta.at("feature_dim").get<std::int32_t>();
    const bool directed = meta.at("directed").get<bool>();
    const auto name = meta.at("name").get<std::string>();
    if (num_nodes < 1) throw IoError(meta_path.string() + ": num_nodes must be positive");
    if (feature_dim < 1) throw IoError(meta_path.string() + ": feature_dim must be positive");
    const NodeId n = static_cast<NodeId>(num_nodes);

    std::map<std::string, std::string> provenance;
    if (meta.contains("provenance")) {
        for (const auto& [k, v] : meta.at("provenance").items()) {
            provenance[k] = v.get<std::string>();
        }
    }

    // edges.tsv
    const fs::path edges_path = dir / "edges.tsv";
    std::vector<EdgeTriple> edges;
    {
        auto in = open_input(edges_path);
        std::string line;
        std::size_t line_no = 0;
        while (read_line(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto fields = split_tabs(line);
            if (fields.size() != 2 && fields.size() != 3) {
                throw IoError(edges_path.string() + ":" + std::to_string(line_no) +
                              ": expected 2 or 3 tab-separated fields, got " +
                              std::to_string(fields.size()));
            }
            EdgeTriple e;
            e.src = parse_number<NodeId>(fields[0], edges_path.string(), line_no, "source id");
            e.dst = parse_number<NodeId>(fields[1], edges_path.string(), line_no, "target id");
            e.rel = fields.size() == 3
                        ? parse_number<std::int32_t>(fields[2], edges_path.string(), line_no,
                                                     "relation id")
                        : 0;
            edges.push_back(e);
        }
    }

    // features.tsv
    const fs::path feat_path = dir / "features.tsv";
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(feature_dim));
    {
        auto in = open_input(feat_path);
        std::string line;
        std::size_t line_no = 0;
        while (read_line(in, line)) {
            ++line_no;
            if (line.empty() && in.peek() == EOF) break;
            if (line_no > static_cast<std::size_t>(n)) {
                throw IoError(feat_path.string() + ": more feature rows than num_nodes = " +
                              std::to_string(n));
            }
            auto fields = split_tabs(line);
            if (fields.size() != static_cast<std::size_t>(feature_dim)) {
                throw IoError(feat_path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(feature_dim) + " feature values, got " +
                              std::to_string(fields.size()));
            }
            for (auto field : fields) {
                double v = parse_number<double>(field, feat_path.string(), line_no, "feature value");
                if (!std::isfinite(v)) {
                    throw IoError(feat_path.string() + ":" + std::to_string(line_no) +
                                  ": non-finite feature value '" + std::string(field) + "'");
                }
                values.push_back(v);
            }
        }
        if (values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(feature_dim)) {
            throw IoError(feat_path.string() + ": expected " + std::to_string(n) +
                          " feature rows, got " +
                          std::to_string(values.size() / static_cast<std::size_t>(feature_dim)));
        }
    }

    // labels.tsv
    const fs::path labels_path = dir / "labels.tsv";
    std::vector<Label> labels(static_cast<std::size_t>(n), Label::unknown);
    {
        auto in = open_input(labels_path);
        std::string line;
        std::size_t line_no = 0;
        while (read_line(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto fields = split_tabs(line);
            if (fields.size() != 2) {
                throw IoError(labels_path.string() + ":" + std::to_string(line_no) +
                              ": expected 'node_id<TAB>label'");
            }
            const auto id =
                parse_number<std::int64_t>(fields[0], labels_path.string(), line_no, "node id");
            const auto y =
                parse_number<std::int32_t>(fields[1], labels_path.string(), line_no, "label");
            if (id < 0 || id >= num_nodes) {
                throw IoError(labels_path.string() + ":" + std::to_string(line_no) +
                              ": node id out of range: " + std::to_string(id));
            }
            if (y != 0 && y != 1) {
                throw IoError(labels_path.string() + ":" + std::to_string(line_no) +
                              ": label must be 0 or 1, got " + std::to_string(y));
            }
            if (labels[static_cast<std::size_t>(id)] != Label::unknown) {
                throw IoError(labels_path.string() + ":" + std::to_string(line_no) +
                              ": duplicate label for node " + std::to_string(id));
            }
            labels[static_cast<std::size_t>(id)] = y == 1 ? Label::anomalous : Label::normal;
        }
    }

    // splits.json (optional)
    std::map<std::string, NamedSplit> named_splits;
    const fs::path splits_path = dir / "splits.json";
    if (fs::exists(splits_path)) {
        json splits = parse_json_file(splits_path);
        for (const auto& [split_name, parts] : splits.items()) {
            NamedSplit s;
            for (auto [key, target] : {std::pair<const char*, std::vector<NodeId>*>{"train", &s.train},
                                       {"val", &s.val},
                                       {"test", &s.test}}) {
                if (!parts.contains(key)) {
                    throw IoError(splits_path.string() + ": split '" + split_name +
                                  "' missing '" + key + "'");
                }
                for (const auto& id : parts.at(key)) {
                    target->push_back(id.get<NodeId>());
                }
            }
            named_splits[split_name] = std::move(s);
        }
    }

    Dataset dataset{build_csr(edges, n, num_relations, directed),
                    FeatureMatrix(n, feature_dim, std::move(values)),
                    LabelTable(std::move(labels)),
                    name,
                    std::move(provenance),
                    std::move(named_splits)};
    validate_dataset(dataset);
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& directory) {
    validate_dataset(dataset);
    const fs::path dir(directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    {
        json meta;
        meta["num_nodes"] = dataset.graph.num_nodes();
        meta["num_relations"] = dataset.graph.num_relations();
        meta["feature_dim"] = dataset.features.dim();
        meta["directed"] = dataset.graph.directed();
        meta["name"] = dataset.name;
        if (!dataset.meta.empty()) {
            meta["provenance"] = dataset.meta;
        }
        auto out = open_output(dir / "meta.json");
        out << meta.dump(2) << '\n';
    }
    {
        auto out = open_output(dir / "edges.tsv");
        for (const auto& e : dataset.graph.edge_list()) {
            out << e.src << '\t' << e.dst << '\t' << e.rel << '\n';
        }
    }
    {
        auto out = open_output(dir / "features.tsv");
        for (NodeId i = 0; i < dataset.features.num_nodes(); ++i) {
            auto row = dataset.features.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j > 0) out << '\t';
                out << format_double(row[j]);
            }
            out << '\n';
        }
    }
    {
        auto out = open_output(dir / "labels.tsv");
        for (NodeId i = 0; i < static_cast<NodeId>(dataset.labels.size()); ++i) {
            if (!dataset.labels.known(i)) continue;
            out << i << '\t' << (dataset.labels.label(i) == Label::anomalous ? 1 : 0) << '\n';
        }
    }
    if (!dataset.named_splits.empty()) {
        json splits;
        for (const auto& [split_name, s] : dataset.named_splits) {
            splits[split_name] = {{"train", s.train}, {"val", s.val}, {"test", s.test}};
        }
        auto out = open_output(dir / "splits.json");
        out << splits.dump(2) << '\n';
    }
}

} // namespace gad
