#include "gad/datagen.hpp"
#include "gad/error.hpp"
#include "gad/parallel.hpp"
#include "gad/protocol.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

using namespace gad;

namespace {

LabelTable labels_with(std::int64_t positives, std::int64_t negatives,
                       std::int64_t unknowns = 0) {
    std::vector<Label> labels;
    for (std::int64_t i = 0; i < positives; ++i) labels.push_back(Label::anomalous);
    for (std::int64_t i = 0; i < negatives; ++i) labels.push_back(Label::normal);
    for (std::int64_t i = 0; i < unknowns; ++i) labels.push_back(Label::unknown);
    return LabelTable(std::move(labels));
}

std::set<NodeId> as_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

bool disjoint(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    const auto sa = as_set(a);
    return std::none_of(b.begin(), b.end(), [&](NodeId id) { return sa.count(id) > 0; });
}

Dataset small_dataset(std::uint64_t seed = 7, double noise = 0.05) {
    GenSpec spec;
    spec.num_nodes = 300;
    spec.avg_degree = 8.0;
    spec.dim = 4;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::neighborhood;
    spec.noise = noise;
    spec.seed = seed;
    return generate(spec);
}

} // namespace

TEST_CASE("seed derivation follows the published SplitMix64 stream") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(derive_seed(42, 3) == splitmix64(42 ^ 3));
    CHECK(derive_seed(42, 3) == 0x118E846EA93BC949ULL);
    Rng rng(0);
    CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("full_split sizes follow the 40/20/40 ratios") {
    const LabelTable labels = labels_with(20, 80);
    const SplitSpec split = full_split(labels, {0.4, 0.2, 0.4}, 1);
    CHECK(split.train.size() == 40);
    CHECK(split.val.size() == 20);
    CHECK(split.test.size() == 40);
    CHECK(disjoint(split.train, split.val));
    CHECK(disjoint(split.train, split.test));
    CHECK(disjoint(split.val, split.test));
}

TEST_CASE("full_split honors custom ratios") {
    const LabelTable labels = labels_with(30, 170);
    const SplitSpec split = full_split(labels, {0.7, 0.15, 0.15}, 3);
    CHECK(split.train.size() == 140);
    CHECK(split.val.size() == 30);
    CHECK(split.test.size() == 30);
}

TEST_CASE("full_split is deterministic in the seed") {
    const LabelTable labels = labels_with(25, 75);
    const SplitSpec a = full_split(labels, {0.4, 0.2, 0.4}, 9);
    const SplitSpec b = full_split(labels, {0.4, 0.2, 0.4}, 9);
    CHECK(a.train == b.train);
    CHECK(a.val == b.val);
    CHECK(a.test == b.test);
    const SplitSpec c = full_split(labels, {0.4, 0.2, 0.4}, 10);
    CHECK(a.train != c.train);
}

TEST_CASE("splits cover exactly the labeled nodes") {
    const LabelTable labels = labels_with(10, 40, 50); // ids 50..99 unlabeled
    const SplitSpec split = full_split(labels, {0.4, 0.2, 0.4}, 2);
    std::set<NodeId> all = as_set(split.train);
    for (NodeId id : split.val) all.insert(id);
    for (NodeId id : split.test) all.insert(id);
    CHECK(all == as_set(labels.known_ids()));
}

TEST_CASE("full_split resamples and eventually fails when train cannot hold both classes") {
    const LabelTable labels = labels_with(1, 1);
    // floor(0.5 * 2) = 1 train node: both classes can never fit.
    CHECK_THROWS_AS(full_split(labels, {0.5, 0.25, 0.25}, 4), ValidationError);

    // One positive among 100: retries usually rescue the draw.
    const LabelTable rare = labels_with(1, 99);
    const SplitSpec split = full_split(rare, {0.4, 0.2, 0.4}, 0);
    std::int64_t pos = 0;
    for (NodeId id : split.train) pos += rare.label(id) == Label::anomalous ? 1 : 0;
    CHECK(pos == 1);
}

TEST_CASE("full_split validates ratio arguments") {
    const LabelTable labels = labels_with(10, 10);
    CHECK_THROWS_AS(full_split(labels, {0.5, 0.5, 0.5}, 0), ValidationError);
    CHECK_THROWS_AS(full_split(labels, {1.0, 0.0, 0.0}, 0), ValidationError);
}

TEST_CASE("semi_split draws 20 positives and 80 negatives across 100 seeds") {
    const LabelTable labels = labels_with(60, 400);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SplitSpec split = semi_split(labels, 20, 80, seed);
        std::int64_t pos = 0;
        for (NodeId id : split.train) pos += labels.label(id) == Label::anomalous ? 1 : 0;
        CHECK(split.train.size() == 100);
        CHECK(pos == 20);
        CHECK(split.val.size() == 100);
        CHECK(disjoint(split.train, split.val));
        CHECK(disjoint(split.train, split.test));
        CHECK(disjoint(split.val, split.test));
        CHECK(split.train.size() + split.val.size() + split.test.size() ==
              static_cast<std::size_t>(labels.num_known()));
    }
}

TEST_CASE("semi_split rejects label-starved datasets") {
    const auto msg_positives = [] {
        try {
            semi_split(labels_with(25, 400), 20, 80, 0);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string{};
    }();
    CHECK(msg_positives.find("insufficient positives for semi split") != std::string::npos);
    CHECK_THROWS_AS(semi_split(labels_with(60, 100), 20, 80, 0), ValidationError);
}

TEST_CASE("family names parse and print round-trip") {
    for (const char* name : {"knn", "rf", "xgb", "rf-graph", "xgb-graph", "rf+na",
                             "xgb-graph+na"}) {
        CHECK(to_string(parse_family(name)) == name);
    }
    CHECK_THROWS_AS(parse_family("gbm"), ValidationError);
    CHECK_THROWS_AS(parse_family(""), ValidationError);
}

TEST_CASE("defaults match the benchmark configuration tables") {
    const ModelConfig rf = default_config(parse_family("rf-graph"));
    CHECK(rf.forest.n_estimators == 100);
    CHECK(rf.forest.criterion == SplitCriterion::gini);
    CHECK(rf.forest.max_samples == 1.0);
    CHECK(rf.layers == 2);
    CHECK(rf.agg == AggKind::mean);

    const ModelConfig xgb = default_config(parse_family("xgb+na"));
    CHECK(xgb.boost.n_estimators == 100);
    CHECK(xgb.boost.learning_rate == 0.3);
    CHECK(xgb.boost.l2_lambda == 1.0);
    CHECK(xgb.boost.subsample == 1.0);
    CHECK(xgb.boost.max_depth == 6);
    CHECK(xgb.boost.base_logit == 0.0);
    CHECK(xgb.na.num_neighbors == 5);
    CHECK(xgb.layers == 0);

    CHECK(default_config(parse_family("knn")).knn.k == 5);
}

TEST_CASE("sampled configs stay inside the table ranges") {
    const FamilySpec family = parse_family("rf-graph");
    const HyperSpace space = hyper_space(family);
    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        const ModelConfig c = sample_config(family, space, rng);
        CHECK(c.forest.n_estimators >= 10);
        CHECK(c.forest.n_estimators <= 200);
        CHECK(c.forest.max_samples >= 0.1);
        CHECK(c.forest.max_samples <= 1.0);
        CHECK(c.layers >= 1);
        CHECK(c.layers <= 4);
    }

    const FamilySpec xgb = parse_family("xgb+na");
    const HyperSpace xspace = hyper_space(xgb);
    Rng xrng(14);
    for (int i = 0; i < 300; ++i) {
        const ModelConfig c = sample_config(xgb, xspace, xrng);
        CHECK(c.boost.learning_rate > 0.05);
        CHECK(c.boost.learning_rate <= 0.5);
        const bool lambda_ok =
            c.boost.l2_lambda == 0.0 || c.boost.l2_lambda == 1.0 || c.boost.l2_lambda == 10.0;
        CHECK(lambda_ok);
        const bool sub_ok = c.boost.subsample == 0.5 || c.boost.subsample == 0.75 ||
                            c.boost.subsample == 1.0;
        CHECK(sub_ok);
        CHECK(c.na.num_neighbors >= 0);
        CHECK(c.na.num_neighbors <= 50);
    }
}

TEST_CASE("a fixed rng stream yields an identical config sequence") {
    const FamilySpec family = parse_family("xgb-graph");
    const HyperSpace space = hyper_space(family);
    Rng a(5);
    Rng b(5);
    for (int i = 0; i < 20; ++i) {
        CHECK(sample_config(family, space, a) == sample_config(family, space, b));
    }
}

TEST_CASE("config overrides apply and reject unknown keys") {
    ModelConfig config = default_config(parse_family("xgb-graph"));
    apply_override(config, "L", "3");
    apply_override(config, "agg", "max");
    apply_override(config, "learning_rate", "0.1");
    CHECK(config.layers == 3);
    CHECK(config.agg == AggKind::max);
    CHECK(config.boost.learning_rate == 0.1);
    CHECK_THROWS_AS(apply_override(config, "booster", "dart"), ValidationError);
    CHECK_THROWS_AS(apply_override(config, "learning_rate", "fast"), ValidationError);
}

TEST_CASE("run_trials with one repeat equals a single train/evaluate call") {
    const Dataset ds = small_dataset();
    const ModelConfig config = default_config(parse_family("rf"));
    RunOptions options;
    options.collect_timing = false;
    const BenchReport report = run_trials(config, ds, Setting::full, 1, 0, options);
    REQUIRE(report.repeats.size() == 1);
    CHECK(report.auroc.mean == report.repeats[0].test.auroc);
    CHECK(report.auroc.stddev == 0.0);
    CHECK(report.auprc.mean == report.repeats[0].test.auprc);
    CHECK(report.repeats[0].split_seed == derive_seed(0, 0));
}

TEST_CASE("bench aggregates are recomputable from the repeats") {
    const Dataset ds = small_dataset();
    const ModelConfig config = default_config(parse_family("knn"));
    RunOptions options;
    options.collect_timing = false;
    const BenchReport report = run_trials(config, ds, Setting::full, 5, 3, options);
    double mean = 0.0;
    for (const auto& r : report.repeats) mean += r.test.auprc;
    mean /= static_cast<double>(report.repeats.size());
    double var = 0.0;
    for (const auto& r : report.repeats) var += (r.test.auprc - mean) * (r.test.auprc - mean);
    var /= static_cast<double>(report.repeats.size());
    CHECK(report.auprc.mean == doctest::Approx(mean).epsilon(1e-15));
    CHECK(report.auprc.stddev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("run_trials is deterministic and worker-count independent") {
    const Dataset ds = small_dataset();
    ModelConfig config = default_config(parse_family("xgb-graph"));
    config.boost.n_estimators = 20;
    RunOptions options;
    options.collect_timing = false;

    set_worker_count(1);
    const BenchReport a = run_trials(config, ds, Setting::semi, 3, 11, options);
    set_worker_count(4);
    const BenchReport b = run_trials(config, ds, Setting::semi, 3, 11, options);
    set_worker_count(0); // back to default
    CHECK(bench_report_to_json(a).dump() == bench_report_to_json(b).dump());
}

TEST_CASE("run_trials covers every family including NA post-processing") {
    const Dataset ds = small_dataset();
    RunOptions options;
    options.collect_timing = false;
    for (const char* family : {"knn", "rf", "xgb", "rf-graph", "xgb-graph", "xgb+na", "knn+na"}) {
        ModelConfig config = default_config(parse_family(family));
        config.forest.n_estimators = 10;
        config.boost.n_estimators = 10;
        const BenchReport report = run_trials(config, ds, Setting::full, 2, 1, options);
        CHECK(report.repeats.size() == 2);
        CHECK(report.family == family);
        for (const auto& r : report.repeats) {
            CHECK(r.test.auroc >= 0.0);
            CHECK(r.test.auroc <= 1.0);
        }
    }
}

TEST_CASE("failed repeats abort with the repeat index") {
    const Dataset ds = small_dataset();
    ModelConfig config = default_config(parse_family("knn"));
    config.knn.k = 5000; // exceeds every training set
    try {
        run_trials(config, ds, Setting::full, 2, 0, {});
        FAIL("expected failure");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("repeat 0") != std::string::npos);
    }
}

TEST_CASE("random_search returns defaults for a single trial") {
    const Dataset ds = small_dataset();
    RunOptions options;
    options.collect_timing = false;
    const SearchReport report =
        random_search(parse_family("rf"), ds, Setting::full, 1, 5, options);
    CHECK(report.best_trial == 0);
    CHECK(report.best().config == default_config(parse_family("rf")));
}

TEST_CASE("random_search winner maximizes validation AUPRC deterministically") {
    const Dataset ds = small_dataset();
    RunOptions options;
    options.collect_timing = false;
    const SearchReport a =
        random_search(parse_family("xgb"), ds, Setting::full, 6, 2, options);
    const SearchReport b =
        random_search(parse_family("xgb"), ds, Setting::full, 6, 2, options);
    CHECK(search_report_to_json(a).dump() == search_report_to_json(b).dump());
    for (const auto& trial : a.trials) {
        CHECK(a.best().val.auprc >= trial.val.auprc);
    }
    CHECK(a.trials[0].config == default_config(parse_family("xgb")));
}

TEST_CASE("the tuned winner reproduces through run_trials repeat zero") {
    const Dataset ds = small_dataset();
    RunOptions options;
    options.collect_timing = false;
    const SearchReport tuned =
        random_search(parse_family("rf-graph"), ds, Setting::full, 4, 21, options);
    const BenchReport rerun = run_trials(tuned.best().config, ds, Setting::full, 1, 21, options);
    CHECK(rerun.repeats[0].test.auroc == tuned.best().test.auroc);
    CHECK(rerun.repeats[0].test.auprc == tuned.best().test.auprc);
    CHECK(rerun.repeats[0].test.rec_at_k == tuned.best().test.rec_at_k);
}

TEST_CASE("named splits from splits.json drive the protocol") {
    Dataset ds = small_dataset();
    const SplitSpec base = full_split(ds.labels, {0.4, 0.2, 0.4}, 123);
    ds.named_splits["frozen"] = NamedSplit{base.train, base.val, base.test};

    RunOptions options;
    options.collect_timing = false;
    options.fixed_split = "frozen";
    const ModelConfig config = default_config(parse_family("knn"));
    const BenchReport a = run_trials(config, ds, Setting::full, 2, 0, options);
    // Both repeats share the frozen split and knn has no fit randomness, so
    // the metrics coincide.
    CHECK(a.repeats[0].test.auroc == a.repeats[1].test.auroc);

    options.fixed_split = "missing";
    CHECK_THROWS_AS(run_trials(config, ds, Setting::full, 1, 0, options), ValidationError);
}

TEST_CASE("feature-only data is already solved at L=0 and stays flat") {
    GenSpec spec;
    spec.num_nodes = 500;
    spec.avg_degree = 8.0;
    spec.dim = 6;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::feature_only;
    spec.noise = 0.0;
    spec.seed = 13;
    const Dataset ds = generate(spec);

    RunOptions options;
    options.collect_timing = false;
    auto auprc_at = [&](std::int32_t layers) {
        ModelConfig config = default_config(parse_family("xgb-graph"));
        config.layers = layers;
        return run_trials(config, ds, Setting::full, 3, 0, options).auprc.mean;
    };
    const double l0 = auprc_at(0);
    const double l2 = auprc_at(2);
    CHECK(l0 >= 0.99);
    CHECK(l2 >= l0 - 0.05); // flat within noise
}
