#include "gad/datagen.hpp"
#include "gad/error.hpp"
#include "gad/parallel.hpp"
#include "gad/protocol.hpp"
#include "gad/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gad::IoError("cannot write file: " + path);
    out << content;
}

void emit_report(const json& doc, const std::string& out_path) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

void apply_set_flags(gad::ModelConfig& config, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--set expects key=value, got '" + kv + "'");
        }
        gad::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

void resolve_workers(int cli_workers) {
    if (cli_workers > 0) {
        gad::set_worker_count(cli_workers);
        return;
    }
    if (const char* env = std::getenv("GAD_WORKERS")) {
        int w = 0;
        auto res = std::from_chars(env, env + std::string_view(env).size(), w);
        if (res.ec != std::errc() || w < 1) {
            throw UsageError("GAD_WORKERS must be a positive integer, got '" + std::string(env) +
                             "'");
        }
        gad::set_worker_count(w);
    }
}

std::array<double, 3> parse_ratios(const std::string& text) {
    std::array<double, 3> ratios{};
    std::stringstream ss(text);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw UsageError("--ratios expects three comma-separated numbers");
        try {
            ratios[static_cast<std::size_t>(i++)] = std::stod(part);
        } catch (const std::exception&) {
            throw UsageError("--ratios: cannot parse '" + part + "'");
        }
    }
    if (i != 3) throw UsageError("--ratios expects three comma-separated numbers");
    return ratios;
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
    std::string mechanism = "neighborhood";
    std::int64_t nodes = 2000;
    double avg_degree = 10.0;
    std::int32_t dim = 8;
    double anomaly_ratio = 0.05;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string name;
};

int cmd_gen(const GenArgs& args) {
    gad::GenSpec spec;
    spec.mechanism = gad::mechanism_from_string(args.mechanism);
    spec.num_nodes = static_cast<gad::NodeId>(args.nodes);
    spec.avg_degree = args.avg_degree;
    spec.dim = args.dim;
    spec.anomaly_ratio = args.anomaly_ratio;
    spec.noise = args.noise;
    spec.seed = args.seed;
    spec.name = args.name;

    const gad::Dataset dataset = gad::generate(spec);
    gad::save_dataset(dataset, args.out);
    std::cout << "dataset " << dataset.name << ": nodes=" << dataset.graph.num_nodes()
              << " edges=" << dataset.graph.edge_list().size() << " dim=" << dataset.features.dim()
              << " anomalies=" << dataset.labels.num_positive() << "\n";
    return 0;
}

// --- run -------------------------------------------------------------------

struct RunArgs {
    std::string data;
    std::string model;
    std::string setting = "full";
    std::int32_t repeats = 10;
    std::uint64_t seed = 0;
    std::string out;
    std::string csv;
    std::vector<std::string> sets;
    std::string ratios;
    std::string split;
    bool no_timing = false;
};

void append_csv_row(const std::string& path, const gad::BenchReport& report) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw gad::IoError("cannot write file: " + path);
    if (fresh) {
        out << "dataset,family,setting,repeats,master_seed,mean_auroc,std_auroc,mean_auprc,"
               "std_auprc,mean_rec_at_k,std_rec_at_k,total_seconds\n";
    }
    out << report.dataset << ',' << report.family << ',' << to_string(report.setting) << ','
        << report.n_repeats << ',' << report.master_seed << ',' << g6(report.auroc.mean) << ','
        << g6(report.auroc.stddev) << ',' << g6(report.auprc.mean) << ','
        << g6(report.auprc.stddev) << ',' << g6(report.rec_at_k.mean) << ','
        << g6(report.rec_at_k.stddev) << ',' << g6(report.total_seconds) << '\n';
}

int cmd_run(const RunArgs& args) {
    const gad::FamilySpec family = gad::parse_family(args.model);
    gad::ModelConfig config = gad::default_config(family);
    apply_set_flags(config, args.sets);

    gad::RunOptions options;
    options.collect_timing = !args.no_timing;
    options.fixed_split = args.split;
    if (!args.ratios.empty()) options.full_ratios = parse_ratios(args.ratios);

    const gad::Dataset dataset = gad::load_dataset(args.data);
    const gad::BenchReport report =
        gad::run_trials(config, dataset, gad::setting_from_string(args.setting), args.repeats,
                        args.seed, options);

    emit_report(gad::bench_report_to_json(report), args.out);
    if (!args.csv.empty()) append_csv_row(args.csv, report);
    if (!args.out.empty()) {
        std::cout << "run " << report.family << " on " << report.dataset << ": auprc "
                  << g6(report.auprc.mean) << " +- " << g6(report.auprc.stddev) << ", auroc "
                  << g6(report.auroc.mean) << ", rec@k " << g6(report.rec_at_k.mean) << "\n";
    }
    return 0;
}

// --- tune ------------------------------------------------------------------

struct TuneArgs {
    std::string data;
    std::string model;
    std::string setting = "full";
    std::int32_t trials = 20;
    std::uint64_t seed = 0;
    std::string out;
    std::string ratios;
    std::string split;
    bool no_timing = false;
};

int cmd_tune(const TuneArgs& args) {
    const gad::FamilySpec family = gad::parse_family(args.model);
    gad::RunOptions options;
    options.collect_timing = !args.no_timing;
    options.fixed_split = args.split;
    if (!args.ratios.empty()) options.full_ratios = parse_ratios(args.ratios);

    const gad::Dataset dataset = gad::load_dataset(args.data);
    const gad::SearchReport report = gad::random_search(
        family, dataset, gad::setting_from_string(args.setting), args.trials, args.seed, options);

    emit_report(gad::search_report_to_json(report), args.out);
    const auto& best = report.best();
    std::cout << "tune " << report.family << " on " << report.dataset << ": best trial "
              << report.best_trial << ", val auprc " << g6(best.val.auprc) << ", test auprc "
              << g6(best.test.auprc) << ", test auroc " << g6(best.test.auroc) << ", test rec@k "
              << g6(best.test.rec_at_k) << "\n";
    return 0;
}

// --- sweep-layers ----------------------------------------------------------

struct SweepArgs {
    std::string data;
    std::string model;
    std::string setting = "full";
    std::int32_t repeats = 10;
    std::uint64_t seed = 0;
    std::string agg = "mean";
    std::string out;
    std::string ratios;
    bool no_timing = false;
};

int cmd_sweep_layers(const SweepArgs& args) {
    const gad::FamilySpec family = gad::parse_family(args.model);
    if (!(family.base == gad::Family::rf_graph || family.base == gad::Family::xgb_graph)) {
        throw gad::ValidationError("sweep-layers expects rf-graph or xgb-graph, got '" +
                                   args.model + "'");
    }
    gad::RunOptions options;
    options.collect_timing = !args.no_timing;
    if (!args.ratios.empty()) options.full_ratios = parse_ratios(args.ratios);

    const gad::Dataset dataset = gad::load_dataset(args.data);
    const gad::Setting setting = gad::setting_from_string(args.setting);

    std::ostringstream csv;
    csv << "L,mean_auprc,std_auprc,mean_auroc,mean_rec_at_k\n";
    for (std::int32_t layers = 0; layers <= 4; ++layers) {
        gad::ModelConfig config = gad::default_config(family);
        config.layers = layers;
        config.agg = gad::agg_kind_from_string(args.agg);
        const gad::BenchReport report =
            gad::run_trials(config, dataset, setting, args.repeats, args.seed, options);
        csv << layers << ',' << g6(report.auprc.mean) << ',' << g6(report.auprc.stddev) << ','
            << g6(report.auroc.mean) << ',' << g6(report.rec_at_k.mean) << '\n';
    }
    if (args.out.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(args.out, csv.str());
        std::cout << "sweep-layers " << to_string(family) << " on " << dataset.name
                  << " written to " << args.out << "\n";
    }
    return 0;
}

// --- convert ---------------------------------------------------------------

struct ConvertArgs {
    std::string edges;
    std::string features;
    std::string labels;
    std::string out;
    std::string name = "converted";
    std::int64_t num_nodes = 0;
    std::int32_t relations = 1;
    bool directed = false;
};

std::vector<std::string> whitespace_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
    return fields;
}

int cmd_convert(const ConvertArgs& args) {
    // Features define the node count: one row per node in id order.
    std::ifstream feat_in(args.features);
    if (!feat_in) throw gad::IoError("missing or unreadable file: " + args.features);
    std::vector<double> values;
    std::int32_t dim = 0;
    std::int64_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(feat_in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = whitespace_fields(line);
        if (dim == 0) dim = static_cast<std::int32_t>(fields.size());
        if (static_cast<std::int32_t>(fields.size()) != dim) {
            throw gad::IoError(args.features + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(dim) + " values, got " +
                               std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            try {
                values.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw gad::IoError(args.features + ":" + std::to_string(line_no) +
                                   ": malformed value '" + f + "'");
            }
        }
        ++rows;
    }
    if (rows == 0) throw gad::IoError(args.features + ": no feature rows");
    const auto n = static_cast<gad::NodeId>(args.num_nodes > 0 ? args.num_nodes : rows);
    if (rows != n) {
        throw gad::IoError(args.features + ": " + std::to_string(rows) +
                           " feature rows but --num-nodes " + std::to_string(n));
    }

    std::ifstream edge_in(args.edges);
    if (!edge_in) throw gad::IoError("missing or unreadable file: " + args.edges);
    std::vector<gad::EdgeTriple> edges;
    line_no = 0;
    while (std::getline(edge_in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = whitespace_fields(line);
        if (fields.size() != 2 && fields.size() != 3) {
            throw gad::IoError(args.edges + ":" + std::to_string(line_no) +
                               ": expected 'src dst [rel]'");
        }
        try {
            gad::EdgeTriple e;
            e.src = static_cast<gad::NodeId>(std::stoll(fields[0]));
            e.dst = static_cast<gad::NodeId>(std::stoll(fields[1]));
            e.rel = fields.size() == 3 ? static_cast<std::int32_t>(std::stoll(fields[2])) : 0;
            edges.push_back(e);
        } catch (const std::exception&) {
            throw gad::IoError(args.edges + ":" + std::to_string(line_no) + ": malformed edge");
        }
    }

    std::ifstream label_in(args.labels);
    if (!label_in) throw gad::IoError("missing or unreadable file: " + args.labels);
    std::vector<gad::Label> labels(static_cast<std::size_t>(n), gad::Label::unknown);
    line_no = 0;
    while (std::getline(label_in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = whitespace_fields(line);
        if (fields.size() != 2) {
            throw gad::IoError(args.labels + ":" + std::to_string(line_no) +
                               ": expected 'node_id label'");
        }
        std::int64_t id = 0;
        int y = -1;
        try {
            id = std::stoll(fields[0]);
            y = std::stoi(fields[1]);
        } catch (const std::exception&) {
            throw gad::IoError(args.labels + ":" + std::to_string(line_no) + ": malformed line");
        }
        if (id < 0 || id >= n) {
            throw gad::IoError(args.labels + ":" + std::to_string(line_no) +
                               ": node id out of range: " + std::to_string(id));
        }
        if (y != 0 && y != 1) {
            throw gad::IoError(args.labels + ":" + std::to_string(line_no) +
                               ": label must be 0 or 1");
        }
        labels[static_cast<std::size_t>(id)] = y == 1 ? gad::Label::anomalous : gad::Label::normal;
    }

    gad::Dataset dataset{gad::build_csr(edges, n, args.relations, args.directed),
                         gad::FeatureMatrix(n, dim, std::move(values)),
                         gad::LabelTable(std::move(labels)),
                         args.name,
                         {},
                         {}};
    gad::save_dataset(dataset, args.out);
    std::cout << "converted " << dataset.name << ": nodes=" << n
              << " edges=" << dataset.graph.edge_list().size() << " dim=" << dim
              << " labeled=" << dataset.labels.num_known() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gad: graph anomaly detection benchmark toolkit"};
    app.set_version_flag("--version", std::string(gad::kArtifactVersion));
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "Worker thread count (default: cores, or GAD_WORKERS)");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset directory");
    gen_cmd->add_option("--mechanism", gen.mechanism, "feature-only or neighborhood");
    gen_cmd->add_option("--nodes", gen.nodes, "Number of nodes");
    gen_cmd->add_option("--avg-degree", gen.avg_degree, "Expected average degree");
    gen_cmd->add_option("--dim", gen.dim, "Feature dimension");
    gen_cmd->add_option("--anomaly-ratio", gen.anomaly_ratio, "Anomaly fraction in (0, 0.25]");
    gen_cmd->add_option("--noise", gen.noise, "Label flip probability");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--name", gen.name, "Dataset name (default: derived)");
    gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run the repeated-trial benchmark protocol");
    run_cmd->add_option("--data", run.data, "Dataset directory")->required();
    run_cmd->add_option("--model", run.model, "Model family (e.g. xgb-graph, rf, knn+na)")
        ->required();
    run_cmd->add_option("--setting", run.setting, "full or semi");
    run_cmd->add_option("--repeats", run.repeats, "Number of repeated splits");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--out", run.out, "Report JSON path (default: stdout)");
    run_cmd->add_option("--csv", run.csv, "Append an aggregate CSV row to this file");
    run_cmd->add_option("--set", run.sets, "Config override key=value (repeatable)");
    run_cmd->add_option("--ratios", run.ratios, "Full-setting ratios, e.g. 0.4,0.2,0.4");
    run_cmd->add_option("--split", run.split, "Use this named split from splits.json");
    run_cmd->add_flag("--no-timing", run.no_timing,
                      "Zero timing/memory fields for byte-reproducible reports");

    TuneArgs tune;
    auto* tune_cmd = app.add_subcommand("tune", "Random hyperparameter search");
    tune_cmd->add_option("--data", tune.data, "Dataset directory")->required();
    tune_cmd->add_option("--model", tune.model, "Model family")->required();
    tune_cmd->add_option("--setting", tune.setting, "full or semi");
    tune_cmd->add_option("--trials", tune.trials, "Number of trials (trial 0 = defaults)");
    tune_cmd->add_option("--seed", tune.seed, "Master seed");
    tune_cmd->add_option("--out", tune.out, "Report JSON path (default: stdout)");
    tune_cmd->add_option("--ratios", tune.ratios, "Full-setting ratios");
    tune_cmd->add_option("--split", tune.split, "Use this named split from splits.json");
    tune_cmd->add_flag("--no-timing", tune.no_timing, "Zero timing/memory fields");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep-layers", "Metric vs aggregation layers L=0..4");
    sweep_cmd->add_option("--data", sweep.data, "Dataset directory")->required();
    sweep_cmd->add_option("--model", sweep.model, "rf-graph or xgb-graph")->required();
    sweep_cmd->add_option("--setting", sweep.setting, "full or semi");
    sweep_cmd->add_option("--repeats", sweep.repeats, "Repeats per layer count");
    sweep_cmd->add_option("--seed", sweep.seed, "Master seed");
    sweep_cmd->add_option("--agg", sweep.agg, "Aggregation kind (mean, sum, max)");
    sweep_cmd->add_option("--out", sweep.out, "CSV output path (default: stdout)");
    sweep_cmd->add_option("--ratios", sweep.ratios, "Full-setting ratios");
    sweep_cmd->add_flag("--no-timing", sweep.no_timing, "Zero timing/memory fields");

    ConvertArgs convert;
    auto* convert_cmd =
        app.add_subcommand("convert", "Ingest plain text edge/feature/label files");
    convert_cmd->add_option("--edges", convert.edges, "Edge list file: src dst [rel]")->required();
    convert_cmd->add_option("--features", convert.features, "Feature file: one node per line")
        ->required();
    convert_cmd->add_option("--labels", convert.labels, "Label file: node_id label")->required();
    convert_cmd->add_option("--out", convert.out, "Output dataset directory")->required();
    convert_cmd->add_option("--name", convert.name, "Dataset name");
    convert_cmd->add_option("--num-nodes", convert.num_nodes, "Node count (default: feature rows)");
    convert_cmd->add_option("--relations", convert.relations, "Number of relations");
    convert_cmd->add_flag("--directed", convert.directed, "Keep edges directed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        resolve_workers(workers);
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (run_cmd->parsed()) return cmd_run(run);
        if (tune_cmd->parsed()) return cmd_tune(tune);
        if (sweep_cmd->parsed()) return cmd_sweep_layers(sweep);
        if (convert_cmd->parsed()) return cmd_convert(convert);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        const json err = {{"error", {{"type", "runtime"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
