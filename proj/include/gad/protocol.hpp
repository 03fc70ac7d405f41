#pragma once

#include "gad/aggregate.hpp"
#include "gad/baselines.hpp"
#include "gad/dataset.hpp"
#include "gad/metrics.hpp"
#include "gad/rng.hpp"
#include "gad/trees.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gad {

enum class Setting { full, semi };

std::string to_string(Setting setting);
Setting setting_from_string(const std::string& name);

struct SplitSpec {
    std::vector<NodeId> train;
    std::vector<NodeId> val;
    std::vector<NodeId> test;
    Setting setting = Setting::full;
    std::uint64_t seed = 0;
};

// Uniform random partition of the labeled nodes by shuffled order. Train and
// val take floor(ratio * n) nodes each, the remainder goes to test. If a
// class is missing from train the draw is repeated, up to 100 attempts.
SplitSpec full_split(const LabelTable& labels, std::array<double, 3> ratios, std::uint64_t seed);

// Semi-supervised split: train = n_pos random positives + n_neg random
// negatives, val = a disjoint draw of the same composition, test = all
// remaining labeled nodes.
SplitSpec semi_split(const LabelTable& labels, std::int32_t n_pos, std::int32_t n_neg,
                     std::uint64_t seed);

enum class Family { knn, rf, xgb, rf_graph, xgb_graph };

struct FamilySpec {
    Family base = Family::xgb_graph;
    bool with_na = false; // "+na" suffix: neighborhood-averaging post-processing

    friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

// Accepts "knn", "rf", "xgb", "rf-graph", "xgb-graph", each optionally
// suffixed with "+na". Throws ValidationError for anything else.
FamilySpec parse_family(const std::string& name);
std::string to_string(FamilySpec family);

// One model configuration: the family plus every knob the family reads.
struct ModelConfig {
    FamilySpec family;
    ForestParams forest;
    BoostParams boost;
    KnnParams knn;
    NaParams na;
    std::int32_t layers = 0;       // aggregation layers; graph families default to 2
    AggKind agg = AggKind::mean;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

ModelConfig default_config(FamilySpec family);

// Applies a "key=value" override (CLI --set). Unknown keys are rejected.
void apply_override(ModelConfig& config, const std::string& key, const std::string& value);

nlohmann::json config_to_json(const ModelConfig& config);

// One hyperparameter's sampling distribution.
struct Dist {
    enum class Kind { choice, uniform, log10_uniform, scaled_log10_uniform, randint };

    Kind kind = Kind::choice;
    std::vector<std::string> options; // choice
    double lo = 0.0;                  // uniform bounds / exponent bounds
    double hi = 0.0;
    double scale = 1.0;               // scaled_log10_uniform: scale * 10^U(lo,hi)
    std::int64_t int_lo = 0;          // randint, both ends inclusive
    std::int64_t int_hi = 0;

    static Dist choice(std::vector<std::string> options);
    static Dist uniform(double lo, double hi);
    static Dist log10_uniform(double lo_exp, double hi_exp);
    static Dist scaled_log10_uniform(double scale, double lo_exp, double hi_exp);
    static Dist randint(std::int64_t lo, std::int64_t hi);

    // Exactly one RNG draw per call, returned as the override string form.
    std::string sample(Rng& rng) const;
};

// Ordered (parameter name, distribution) pairs reproducing the benchmark's
// search space for the family: base model parameters, then aggregation
// parameters for -graph families, then the NA neighbor count.
using HyperSpace = std::vector<std::pair<std::string, Dist>>;

HyperSpace hyper_space(FamilySpec family);

// One independent draw per parameter, applied on top of the defaults.
ModelConfig sample_config(FamilySpec family, const HyperSpace& space, Rng& rng);

struct RepeatResult {
    std::int32_t repeat = 0;
    std::uint64_t split_seed = 0;
    MetricReport test;
};

struct MetricAggregate {
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation over repeats
};

struct BenchReport {
    std::string dataset;
    std::string family;
    Setting setting = Setting::full;
    std::int32_t n_repeats = 0;
    std::uint64_t master_seed = 0;
    ModelConfig config;
    std::vector<RepeatResult> repeats;
    MetricAggregate auroc;
    MetricAggregate auprc;
    MetricAggregate rec_at_k;
    double total_seconds = 0.0;
};

struct RunOptions {
    std::array<double, 3> full_ratios{0.4, 0.2, 0.4};
    std::int32_t semi_positives = 20;
    std::int32_t semi_negatives = 80;
    bool collect_timing = true;   // false zeroes every timing/memory field
    std::string fixed_split;      // named split from splits.json instead of random splits
};

// The repeated-trial protocol: for repeat r the labeled nodes are split with
// seed derive_seed(master_seed, r), the model is trained on the train set
// with seed derive_seed(split_seed, 1) and evaluated on the test set.
// Stacked features are built once per (layers, agg) and reused across
// repeats. Any repeat failure aborts with the repeat index in the message.
BenchReport run_trials(const ModelConfig& config, const Dataset& dataset, Setting setting,
                       std::int32_t n_repeats, std::uint64_t master_seed,
                       const RunOptions& options = {});

struct TrialResult {
    std::int32_t trial = 0;
    ModelConfig config;
    MetricReport val;
    MetricReport test;
};

struct SearchReport {
    std::string dataset;
    std::string family;
    Setting setting = Setting::full;
    std::int32_t n_trials = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t split_seed = 0;
    std::vector<TrialResult> trials;
    std::int32_t best_trial = 0;
    double total_seconds = 0.0;

    const TrialResult& best() const { return trials[static_cast<std::size_t>(best_trial)]; }
};

// Random hyperparameter search on one fixed split (seed derive_seed(master,
// 0)). Trial 0 is always the default configuration; trial t >= 1 draws from
// hyper_space with seed derive_seed(master, t). The winner maximizes
// validation AUPRC, ties broken by lower trial index.
SearchReport random_search(FamilySpec family, const Dataset& dataset, Setting setting,
                           std::int32_t n_trials, std::uint64_t master_seed,
                           const RunOptions& options = {});

nlohmann::json bench_report_to_json(const BenchReport& report);
nlohmann::json search_report_to_json(const SearchReport& report);

} // namespace gad
