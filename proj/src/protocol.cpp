#include "gad/protocol.hpp"

#include "gad/error.hpp"
#include "gad/matrix_view.hpp"
#include "gad/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <list>
#include <optional>
#include <stdexcept>

namespace gad {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<NodeId> shuffled_ids(std::vector<NodeId> ids, Rng& rng) {
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
        const auto j = static_cast<std::size_t>(
            rng.next_int(static_cast<std::int64_t>(k), static_cast<std::int64_t>(ids.size()) - 1));
        std::swap(ids[k], ids[j]);
    }
    return ids;
}

bool has_both_classes(const LabelTable& labels, const std::vector<NodeId>& ids) {
    bool pos = false;
    bool neg = false;
    for (NodeId id : ids) {
        if (labels.label(id) == Label::anomalous) pos = true;
        else if (labels.label(id) == Label::normal) neg = true;
    }
    return pos && neg;
}

double parse_double_value(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("override " + key + ": cannot parse '" + value + "' as a number");
    }
}

std::int64_t parse_int_value(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("override " + key + ": cannot parse '" + value + "' as an integer");
    }
}

bool uses_forest(FamilySpec f) { return f.base == Family::rf || f.base == Family::rf_graph; }
bool uses_boost(FamilySpec f) { return f.base == Family::xgb || f.base == Family::xgb_graph; }
bool uses_graph(FamilySpec f) {
    return f.base == Family::rf_graph || f.base == Family::xgb_graph;
}

// Stacked-feature store shared by all repeats/trials on one dataset: one
// merged single-relation view, one StackedFeatures per (layers, agg).
class FeatureCache {
public:
    explicit FeatureCache(const Dataset& dataset) : dataset_(dataset) {}

    MatrixView inputs_for(const ModelConfig& config) {
        if (!uses_graph(config.family) || config.layers == 0) {
            return MatrixView::of(dataset_.features);
        }
        const Key key{config.layers, static_cast<std::int32_t>(config.agg)};
        for (auto it = stacked_.begin(); it != stacked_.end(); ++it) {
            if (it->first == key) {
                stacked_.splice(stacked_.begin(), stacked_, it); // LRU touch
                return MatrixView::of(stacked_.front().second);
            }
        }
        if (!merged_) merged_.emplace(merged_view(dataset_.graph));
        stacked_.emplace_front(key,
                               stack(*merged_, dataset_.features, config.layers, config.agg));
        if (stacked_.size() > kMaxCached) stacked_.pop_back();
        return MatrixView::of(stacked_.front().second);
    }

private:
    using Key = std::pair<std::int32_t, std::int32_t>; // (layers, agg)
    static constexpr std::size_t kMaxCached = 3;

    const Dataset& dataset_;
    std::optional<Graph> merged_;
    std::list<std::pair<Key, StackedFeatures>> stacked_;
};

struct GatheredRows {
    std::vector<double> values;
    std::vector<std::int32_t> labels;
    std::int64_t rows = 0;
    std::int32_t cols = 0;

    MatrixView view() const { return {values.data(), rows, cols}; }
};

// Keeps only labeled ids; named splits from disk may reference unlabeled
// nodes, which carry no training or evaluation signal.
std::vector<NodeId> labeled_only(const std::vector<NodeId>& ids, const LabelTable& labels) {
    std::vector<NodeId> out;
    out.reserve(ids.size());
    for (NodeId id : ids) {
        if (labels.known(id)) out.push_back(id);
    }
    return out;
}

std::vector<std::int32_t> labels_of(const LabelTable& labels, const std::vector<NodeId>& ids) {
    std::vector<std::int32_t> out;
    out.reserve(ids.size());
    for (NodeId id : ids) out.push_back(labels.label(id) == Label::anomalous ? 1 : 0);
    return out;
}

GatheredRows gather(MatrixView inputs, const LabelTable& labels, const std::vector<NodeId>& ids) {
    GatheredRows g;
    g.rows = static_cast<std::int64_t>(ids.size());
    g.cols = inputs.cols;
    g.values.reserve(ids.size() * static_cast<std::size_t>(inputs.cols));
    g.labels.reserve(ids.size());
    for (NodeId id : ids) {
        const auto row = inputs.row(id);
        g.values.insert(g.values.end(), row.begin(), row.end());
        g.labels.push_back(labels.label(id) == Label::anomalous ? 1 : 0);
    }
    return g;
}

struct FittedScores {
    std::vector<double> test_scores;
    std::vector<std::int32_t> test_labels;
    std::vector<double> val_scores;
    std::vector<std::int32_t> val_labels;
    double fit_seconds = 0.0;
    std::int64_t peak_memory = 0;
};

// Trains one configuration on the split's train set and scores the test (and
// optionally val) nodes, applying NA post-processing over the raw feature
// space when requested.
FittedScores fit_and_score(const ModelConfig& config, const Dataset& dataset, MatrixView inputs,
                           const SplitSpec& split, std::uint64_t model_seed, bool want_val,
                           bool collect_timing) {
    const auto start = Clock::now();
    const auto& labels = dataset.labels;

    const auto train_ids = labeled_only(split.train, labels);
    const auto test_ids = labeled_only(split.test, labels);
    const auto val_ids = want_val ? labeled_only(split.val, labels) : std::vector<NodeId>{};
    if (train_ids.empty()) throw ValidationError("split has no labeled training nodes");

    const GatheredRows train = gather(inputs, labels, train_ids);

    EnsembleModel model;
    const bool tree_family = uses_forest(config.family) || uses_boost(config.family);
    if (uses_forest(config.family)) {
        model = fit_random_forest(train.view(), train.labels, config.forest, model_seed);
    } else if (uses_boost(config.family)) {
        model = fit_gbt(train.view(), train.labels, config.boost, model_seed);
    }

    auto score_ids = [&](const std::vector<NodeId>& ids) {
        const GatheredRows rows = gather(inputs, labels, ids);
        return tree_family ? predict_scores(model, rows.view())
                           : knn_scores(train.view(), train.labels, rows.view(), config.knn);
    };

    FittedScores out;
    if (config.family.with_na) {
        // Score every node, average in raw feature space, then slice.
        std::vector<NodeId> all_ids(static_cast<std::size_t>(dataset.graph.num_nodes()));
        std::iota(all_ids.begin(), all_ids.end(), NodeId{0});
        std::vector<double> all_scores = score_ids(all_ids);
        all_scores = neighborhood_average(all_scores, MatrixView::of(dataset.features), config.na);
        auto slice = [&](const std::vector<NodeId>& ids) {
            std::vector<double> s;
            s.reserve(ids.size());
            for (NodeId id : ids) s.push_back(all_scores[static_cast<std::size_t>(id)]);
            return s;
        };
        out.test_scores = slice(test_ids);
        if (want_val) out.val_scores = slice(val_ids);
    } else {
        out.test_scores = score_ids(test_ids);
        if (want_val) out.val_scores = score_ids(val_ids);
    }

    out.test_labels = labels_of(labels, test_ids);
    if (want_val) out.val_labels = labels_of(labels, val_ids);
    if (collect_timing) {
        out.fit_seconds = seconds_since(start);
        out.peak_memory = current_peak_memory_bytes();
    }
    return out;
}

MetricAggregate aggregate_metric(const std::vector<RepeatResult>& repeats,
                                 double MetricReport::*field) {
    MetricAggregate agg;
    if (repeats.empty()) return agg;
    const double n = static_cast<double>(repeats.size());
    for (const auto& r : repeats) agg.mean += r.test.*field;
    agg.mean /= n;
    double var = 0.0;
    for (const auto& r : repeats) {
        const double d = r.test.*field - agg.mean;
        var += d * d;
    }
    agg.stddev = std::sqrt(var / n);
    return agg;
}

nlohmann::json metric_report_to_json(const MetricReport& m) {
    return {{"auroc", m.auroc},
            {"auprc", m.auprc},
            {"rec_at_k", m.rec_at_k},
            {"k", m.k},
            {"num_pos", m.num_pos},
            {"num_neg", m.num_neg},
            {"fit_seconds", m.fit_seconds},
            {"peak_memory_bytes", m.peak_memory_bytes}};
}

SplitSpec make_split(const Dataset& dataset, Setting setting, std::uint64_t split_seed,
                     const RunOptions& options) {
    if (!options.fixed_split.empty()) {
        const auto it = dataset.named_splits.find(options.fixed_split);
        if (it == dataset.named_splits.end()) {
            throw ValidationError("dataset has no split named '" + options.fixed_split + "'");
        }
        SplitSpec split;
        split.train = it->second.train;
        split.val = it->second.val;
        split.test = it->second.test;
        split.setting = setting;
        split.seed = split_seed;
        return split;
    }
    if (setting == Setting::full) {
        return full_split(dataset.labels, options.full_ratios, split_seed);
    }
    return semi_split(dataset.labels, options.semi_positives, options.semi_negatives, split_seed);
}

} // namespace

std::string to_string(Setting setting) { return setting == Setting::full ? "full" : "semi"; }

Setting setting_from_string(const std::string& name) {
    if (name == "full") return Setting::full;
    if (name == "semi") return Setting::semi;
    throw ValidationError("unknown setting '" + name + "' (expected full or semi)");
}

SplitSpec full_split(const LabelTable& labels, std::array<double, 3> ratios, std::uint64_t seed) {
    for (double r : ratios) {
        if (!(r > 0.0)) throw ValidationError("full_split: ratios must be positive");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw ValidationError("full_split: ratios must sum to 1");
    }
    const std::vector<NodeId> known = labels.known_ids();
    const auto n = static_cast<std::int64_t>(known.size());
    const auto n_train = static_cast<std::int64_t>(std::floor(ratios[0] * static_cast<double>(n)));
    const auto n_val = static_cast<std::int64_t>(std::floor(ratios[1] * static_cast<double>(n)));
    if (n_train < 1) throw ValidationError("full_split: empty training set");

    Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<NodeId> order = shuffled_ids(known, rng);
        SplitSpec split;
        split.setting = Setting::full;
        split.seed = seed;
        split.train.assign(order.begin(), order.begin() + n_train);
        split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
        split.test.assign(order.begin() + n_train + n_val, order.end());
        if (has_both_classes(labels, split.train)) return split;
    }
    throw ValidationError("full_split: could not draw a training set containing both classes "
                          "in 100 attempts");
}

SplitSpec semi_split(const LabelTable& labels, std::int32_t n_pos, std::int32_t n_neg,
                     std::uint64_t seed) {
    if (n_pos < 1 || n_neg < 1) throw ValidationError("semi_split: counts must be positive");
    if (labels.num_positive() < 2 * static_cast<std::int64_t>(n_pos)) {
        throw ValidationError("insufficient positives for semi split: need " +
                              std::to_string(2 * n_pos) + " (train + validation), have " +
                              std::to_string(labels.num_positive()));
    }
    if (labels.num_negative() < 2 * static_cast<std::int64_t>(n_neg)) {
        throw ValidationError("insufficient negatives for semi split: need " +
                              std::to_string(2 * n_neg) + " (train + validation), have " +
                              std::to_string(labels.num_negative()));
    }

    std::vector<NodeId> positives;
    std::vector<NodeId> negatives;
    for (NodeId id : labels.known_ids()) {
        (labels.label(id) == Label::anomalous ? positives : negatives).push_back(id);
    }
    Rng rng(seed);
    positives = shuffled_ids(std::move(positives), rng);
    negatives = shuffled_ids(std::move(negatives), rng);

    SplitSpec split;
    split.setting = Setting::semi;
    split.seed = seed;
    split.train.assign(positives.begin(), positives.begin() + n_pos);
    split.train.insert(split.train.end(), negatives.begin(), negatives.begin() + n_neg);
    split.val.assign(positives.begin() + n_pos, positives.begin() + 2 * n_pos);
    split.val.insert(split.val.end(), negatives.begin() + n_neg, negatives.begin() + 2 * n_neg);
    split.test.assign(positives.begin() + 2 * n_pos, positives.end());
    split.test.insert(split.test.end(), negatives.begin() + 2 * n_neg, negatives.end());
    return split;
}

FamilySpec parse_family(const std::string& name) {
    std::string base = name;
    FamilySpec spec;
    if (base.size() > 3 && base.substr(base.size() - 3) == "+na") {
        spec.with_na = true;
        base = base.substr(0, base.size() - 3);
    }
    if (base == "knn") spec.base = Family::knn;
    else if (base == "rf") spec.base = Family::rf;
    else if (base == "xgb") spec.base = Family::xgb;
    else if (base == "rf-graph") spec.base = Family::rf_graph;
    else if (base == "xgb-graph") spec.base = Family::xgb_graph;
    else {
        throw ValidationError("unknown family '" + name +
                              "' (expected knn, rf, xgb, rf-graph, or xgb-graph, optionally "
                              "with +na)");
    }
    return spec;
}

std::string to_string(FamilySpec family) {
    std::string base;
    switch (family.base) {
        case Family::knn: base = "knn"; break;
        case Family::rf: base = "rf"; break;
        case Family::xgb: base = "xgb"; break;
        case Family::rf_graph: base = "rf-graph"; break;
        case Family::xgb_graph: base = "xgb-graph"; break;
    }
    return family.with_na ? base + "+na" : base;
}

ModelConfig default_config(FamilySpec family) {
    ModelConfig config;
    config.family = family;
    if (uses_graph(family)) {
        config.layers = 2;
        config.agg = AggKind::mean;
    }
    return config;
}

void apply_override(ModelConfig& config, const std::string& key, const std::string& value) {
    if (key == "n_estimators") {
        const auto v = static_cast<std::int32_t>(parse_int_value(key, value));
        config.forest.n_estimators = v;
        config.boost.n_estimators = v;
    } else if (key == "criterion") {
        config.forest.criterion = criterion_from_string(value);
    } else if (key == "max_samples") {
        config.forest.max_samples = parse_double_value(key, value);
    } else if (key == "max_features") {
        config.forest.max_features = static_cast<std::int32_t>(parse_int_value(key, value));
    } else if (key == "min_samples_leaf") {
        config.forest.min_samples_leaf = static_cast<std::int32_t>(parse_int_value(key, value));
    } else if (key == "max_depth") {
        const auto v = static_cast<std::int32_t>(parse_int_value(key, value));
        config.forest.max_depth = v;
        config.boost.max_depth = v;
    } else if (key == "split_mode") {
        const SplitMode mode = split_mode_from_string(value);
        config.forest.split_mode = mode;
        config.boost.split_mode = mode;
    } else if (key == "bootstrap") {
        if (value != "true" && value != "false") {
            throw ValidationError("override bootstrap: expected true or false");
        }
        config.forest.bootstrap = value == "true";
    } else if (key == "learning_rate") {
        config.boost.learning_rate = parse_double_value(key, value);
    } else if (key == "l2_lambda") {
        config.boost.l2_lambda = parse_double_value(key, value);
    } else if (key == "subsample") {
        config.boost.subsample = parse_double_value(key, value);
    } else if (key == "base_logit") {
        config.boost.base_logit = parse_double_value(key, value);
    } else if (key == "positive_weight") {
        const double v = parse_double_value(key, value);
        config.forest.positive_weight = v;
        config.boost.positive_weight = v;
    } else if (key == "k") {
        config.knn.k = static_cast<std::int32_t>(parse_int_value(key, value));
    } else if (key == "num_neighbors") {
        config.na.num_neighbors = static_cast<std::int32_t>(parse_int_value(key, value));
    } else if (key == "L" || key == "layers") {
        config.layers = static_cast<std::int32_t>(parse_int_value(key, value));
        if (config.layers < 0) throw ValidationError("override " + key + ": must be >= 0");
    } else if (key == "agg") {
        config.agg = agg_kind_from_string(value);
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

nlohmann::json config_to_json(const ModelConfig& config) {
    nlohmann::json doc;
    doc["family"] = to_string(config.family);
    if (uses_forest(config.family)) {
        doc["n_estimators"] = config.forest.n_estimators;
        doc["criterion"] = to_string(config.forest.criterion);
        doc["max_samples"] = config.forest.max_samples;
        doc["max_features"] = config.forest.max_features;
        doc["min_samples_leaf"] = config.forest.min_samples_leaf;
        doc["max_depth"] = config.forest.max_depth;
        doc["positive_weight"] = config.forest.positive_weight;
        doc["bootstrap"] = config.forest.bootstrap;
        doc["split_mode"] = to_string(config.forest.split_mode);
    } else if (uses_boost(config.family)) {
        doc["n_estimators"] = config.boost.n_estimators;
        doc["learning_rate"] = config.boost.learning_rate;
        doc["l2_lambda"] = config.boost.l2_lambda;
        doc["subsample"] = config.boost.subsample;
        doc["max_depth"] = config.boost.max_depth;
        doc["base_logit"] = config.boost.base_logit;
        doc["positive_weight"] = config.boost.positive_weight;
        doc["split_mode"] = to_string(config.boost.split_mode);
    } else {
        doc["k"] = config.knn.k;
    }
    if (uses_graph(config.family)) {
        doc["layers"] = config.layers;
        doc["agg"] = to_string(config.agg);
    }
    if (config.family.with_na) {
        doc["num_neighbors"] = config.na.num_neighbors;
    }
    return doc;
}

Dist Dist::choice(std::vector<std::string> options) {
    Dist d;
    d.kind = Kind::choice;
    d.options = std::move(options);
    return d;
}

Dist Dist::uniform(double lo, double hi) {
    Dist d;
    d.kind = Kind::uniform;
    d.lo = lo;
    d.hi = hi;
    return d;
}

Dist Dist::log10_uniform(double lo_exp, double hi_exp) {
    Dist d;
    d.kind = Kind::log10_uniform;
    d.lo = lo_exp;
    d.hi = hi_exp;
    return d;
}

Dist Dist::scaled_log10_uniform(double scale, double lo_exp, double hi_exp) {
    Dist d;
    d.kind = Kind::scaled_log10_uniform;
    d.scale = scale;
    d.lo = lo_exp;
    d.hi = hi_exp;
    return d;
}

Dist Dist::randint(std::int64_t lo, std::int64_t hi) {
    Dist d;
    d.kind = Kind::randint;
    d.int_lo = lo;
    d.int_hi = hi;
    return d;
}

std::string Dist::sample(Rng& rng) const {
    switch (kind) {
        case Kind::choice:
            return options[static_cast<std::size_t>(
                rng.next_int(0, static_cast<std::int64_t>(options.size()) - 1))];
        case Kind::uniform:
            return format_double(rng.next_uniform(lo, hi));
        case Kind::log10_uniform:
            return format_double(std::pow(10.0, rng.next_uniform(lo, hi)));
        case Kind::scaled_log10_uniform:
            return format_double(scale * std::pow(10.0, rng.next_uniform(lo, hi)));
        case Kind::randint:
            return std::to_string(rng.next_int(int_lo, int_hi));
    }
    throw ValidationError("Dist::sample: bad kind");
}

HyperSpace hyper_space(FamilySpec family) {
    HyperSpace space;
    if (uses_forest(family)) {
        space.emplace_back("n_estimators", Dist::randint(10, 200));
        space.emplace_back("criterion", Dist::choice({"gini", "entropy"}));
        space.emplace_back("max_samples", Dist::uniform(0.1, 1.0));
    } else if (uses_boost(family)) {
        space.emplace_back("n_estimators", Dist::randint(10, 200));
        space.emplace_back("learning_rate", Dist::scaled_log10_uniform(0.5, -1.0, 0.0));
        space.emplace_back("l2_lambda", Dist::choice({"0", "1", "10"}));
        space.emplace_back("subsample", Dist::choice({"0.5", "0.75", "1"}));
    }
    if (uses_graph(family)) {
        space.emplace_back("layers", Dist::choice({"1", "2", "3", "4"}));
        space.emplace_back("agg", Dist::choice({"sum", "mean", "max"}));
    }
    if (family.with_na) {
        space.emplace_back("num_neighbors", Dist::randint(0, 50));
    }
    return space;
}

ModelConfig sample_config(FamilySpec family, const HyperSpace& space, Rng& rng) {
    ModelConfig config = default_config(family);
    for (const auto& [name, dist] : space) {
        apply_override(config, name, dist.sample(rng));
    }
    return config;
}

BenchReport run_trials(const ModelConfig& config, const Dataset& dataset, Setting setting,
                       std::int32_t n_repeats, std::uint64_t master_seed,
                       const RunOptions& options) {
    if (n_repeats < 1) throw ValidationError("run_trials: n_repeats must be at least 1");
    const auto start = Clock::now();

    BenchReport report;
    report.dataset = dataset.name;
    report.family = to_string(config.family);
    report.setting = setting;
    report.n_repeats = n_repeats;
    report.master_seed = master_seed;
    report.config = config;

    FeatureCache cache(dataset);
    const MatrixView inputs = cache.inputs_for(config);

    for (std::int32_t r = 0; r < n_repeats; ++r) {
        try {
            const std::uint64_t split_seed = derive_seed(master_seed, static_cast<std::uint64_t>(r));
            const SplitSpec split = make_split(dataset, setting, split_seed, options);
            const std::uint64_t model_seed = derive_seed(split_seed, 1);
            FittedScores scored = fit_and_score(config, dataset, inputs, split, model_seed,
                                                /*want_val=*/false, options.collect_timing);
            RepeatResult result;
            result.repeat = r;
            result.split_seed = split_seed;
            result.test = evaluate(scored.test_scores, scored.test_labels, scored.fit_seconds,
                                   scored.peak_memory);
            report.repeats.push_back(std::move(result));
        } catch (const std::exception& e) {
            throw ValidationError("repeat " + std::to_string(r) + " failed: " + e.what());
        }
    }

    report.auroc = aggregate_metric(report.repeats, &MetricReport::auroc);
    report.auprc = aggregate_metric(report.repeats, &MetricReport::auprc);
    report.rec_at_k = aggregate_metric(report.repeats, &MetricReport::rec_at_k);
    if (options.collect_timing) report.total_seconds = seconds_since(start);
    return report;
}

SearchReport random_search(FamilySpec family, const Dataset& dataset, Setting setting,
                           std::int32_t n_trials, std::uint64_t master_seed,
                           const RunOptions& options) {
    if (n_trials < 1) throw ValidationError("random_search: n_trials must be at least 1");
    const auto start = Clock::now();

    SearchReport report;
    report.dataset = dataset.name;
    report.family = to_string(family);
    report.setting = setting;
    report.n_trials = n_trials;
    report.master_seed = master_seed;
    report.split_seed = derive_seed(master_seed, 0);

    const SplitSpec split = make_split(dataset, setting, report.split_seed, options);
    const std::uint64_t model_seed = derive_seed(report.split_seed, 1);
    const HyperSpace space = hyper_space(family);

    FeatureCache cache(dataset);
    for (std::int32_t t = 0; t < n_trials; ++t) {
        try {
            TrialResult trial;
            trial.trial = t;
            if (t == 0) {
                trial.config = default_config(family);
            } else {
                Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(t)));
                trial.config = sample_config(family, space, rng);
            }
            const MatrixView inputs = cache.inputs_for(trial.config);
            FittedScores scored = fit_and_score(trial.config, dataset, inputs, split, model_seed,
                                                /*want_val=*/true, options.collect_timing);
            trial.test = evaluate(scored.test_scores, scored.test_labels, scored.fit_seconds,
                                  scored.peak_memory);
            trial.val = evaluate(scored.val_scores, scored.val_labels, scored.fit_seconds,
                                 scored.peak_memory);
            report.trials.push_back(std::move(trial));
        } catch (const std::exception& e) {
            throw ValidationError("trial " + std::to_string(t) + " failed: " + e.what());
        }
    }

    report.best_trial = 0;
    for (std::int32_t t = 1; t < n_trials; ++t) {
        if (report.trials[static_cast<std::size_t>(t)].val.auprc >
            report.trials[static_cast<std::size_t>(report.best_trial)].val.auprc) {
            report.best_trial = t;
        }
    }
    if (options.collect_timing) report.total_seconds = seconds_since(start);
    return report;
}

nlohmann::json bench_report_to_json(const BenchReport& report) {
    nlohmann::json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["artifact_version"] = kArtifactVersion;
    doc["kind"] = "bench";
    doc["dataset"] = report.dataset;
    doc["family"] = report.family;
    doc["setting"] = to_string(report.setting);
    doc["n_repeats"] = report.n_repeats;
    doc["master_seed"] = report.master_seed;
    doc["config"] = config_to_json(report.config);
    auto& repeats = doc["repeats"] = nlohmann::json::array();
    for (const auto& r : report.repeats) {
        nlohmann::json entry = metric_report_to_json(r.test);
        entry["repeat"] = r.repeat;
        entry["split_seed"] = r.split_seed;
        repeats.push_back(std::move(entry));
    }
    doc["aggregate"] = {
        {"auroc", {{"mean", report.auroc.mean}, {"std", report.auroc.stddev}}},
        {"auprc", {{"mean", report.auprc.mean}, {"std", report.auprc.stddev}}},
        {"rec_at_k", {{"mean", report.rec_at_k.mean}, {"std", report.rec_at_k.stddev}}},
    };
    doc["total_seconds"] = report.total_seconds;
    return doc;
}

nlohmann::json search_report_to_json(const SearchReport& report) {
    nlohmann::json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["artifact_version"] = kArtifactVersion;
    doc["kind"] = "tune";
    doc["dataset"] = report.dataset;
    doc["family"] = report.family;
    doc["setting"] = to_string(report.setting);
    doc["n_trials"] = report.n_trials;
    doc["master_seed"] = report.master_seed;
    doc["split_seed"] = report.split_seed;
    auto& trials = doc["trials"] = nlohmann::json::array();
    for (const auto& t : report.trials) {
        trials.push_back({{"trial", t.trial},
                          {"config", config_to_json(t.config)},
                          {"val", metric_report_to_json(t.val)},
                          {"test", metric_report_to_json(t.test)}});
    }
    doc["best_trial"] = report.best_trial;
    doc["best"] = {{"config", config_to_json(report.best().config)},
                   {"val_auprc", report.best().val.auprc},
                   {"test", metric_report_to_json(report.best().test)}};
    doc["total_seconds"] = report.total_seconds;
    return doc;
}

} // namespace gad
