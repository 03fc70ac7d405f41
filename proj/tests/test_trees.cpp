#include "gad/datagen.hpp"
#include "gad/error.hpp"
#include "gad/metrics.hpp"
#include "gad/trees.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace gad;

namespace {

struct Table {
    std::vector<double> values;
    std::int64_t rows = 0;
    std::int32_t cols = 0;
    MatrixView view() const { return {values.data(), rows, cols}; }
};

Table table(std::vector<std::vector<double>> rows) {
    Table t;
    t.rows = static_cast<std::int64_t>(rows.size());
    t.cols = static_cast<std::int32_t>(rows.front().size());
    for (const auto& r : rows) t.values.insert(t.values.end(), r.begin(), r.end());
    return t;
}

std::vector<std::int64_t> all_ids(std::int64_t n) {
    std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), std::int64_t{0});
    return ids;
}

// Total logistic loss of a boosted model's logits on its training data.
double training_logistic_loss(const EnsembleModel& model, MatrixView x,
                              std::span<const std::int32_t> y, std::size_t used_trees) {
    double loss = 0.0;
    for (std::int64_t i = 0; i < x.rows; ++i) {
        double z = model.boost_params.base_logit;
        for (std::size_t t = 0; t < used_trees; ++t) {
            z += model.boost_params.learning_rate * model.trees[t].predict_row(x.row(i));
        }
        const double target = y[static_cast<std::size_t>(i)];
        loss += std::log1p(std::exp(z)) - target * z;
    }
    return loss;
}

Table gathered(const Dataset& ds) {
    Table t;
    t.rows = ds.features.num_nodes();
    t.cols = ds.features.dim();
    t.values = ds.features.values();
    return t;
}

std::vector<std::int32_t> label_vector(const Dataset& ds) {
    std::vector<std::int32_t> y;
    for (NodeId i = 0; i < ds.features.num_nodes(); ++i) {
        y.push_back(ds.labels.label(i) == Label::anomalous ? 1 : 0);
    }
    return y;
}

} // namespace

TEST_CASE("pure nodes become immediate leaves") {
    const Table t = table({{0.0}, {1.0}, {2.0}});
    const std::vector<std::int32_t> y{1, 1, 1};
    const std::vector<double> w{1, 1, 1};
    Rng rng(1);
    const Tree tree = fit_tree(t.view(), all_ids(3), y, w, {}, rng);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].feature == -1);
    CHECK(tree.nodes[0].value == 1.0);
}

TEST_CASE("a separable pair yields one split with threshold inside [0, 1)") {
    const Table t = table({{0.0}, {1.0}});
    const std::vector<std::int32_t> y{0, 1};
    const std::vector<double> w{1, 1};
    Rng rng(1);
    const Tree tree = fit_tree(t.view(), all_ids(2), y, w, {}, rng);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold >= 0.0);
    CHECK(tree.nodes[0].threshold < 1.0);
    CHECK(tree.predict_row(std::vector<double>{0.0}) == 0.0);
    CHECK(tree.predict_row(std::vector<double>{1.0}) == 1.0);
}

TEST_CASE("boosting leaf value is -G/(H + lambda)") {
    // g = -0.5, h = 0.25 per sample, lambda = 1, forced leaf:
    // value = 0.5 n / (0.25 n + 1).
    for (const std::int64_t n : {1, 4, 10}) {
        Table t;
        t.rows = n;
        t.cols = 1;
        t.values.assign(static_cast<std::size_t>(n), 0.0);
        std::vector<double> g(static_cast<std::size_t>(n), -0.5);
        std::vector<double> h(static_cast<std::size_t>(n), 0.25);
        TreeFitParams params;
        params.max_depth = 0; // force a leaf
        params.l2_lambda = 1.0;
        Rng rng(1);
        const Tree tree = fit_tree(t.view(), all_ids(n), g, h, params, rng);
        REQUIRE(tree.nodes.size() == 1);
        const double expected = 0.5 * static_cast<double>(n) / (0.25 * static_cast<double>(n) + 1.0);
        CHECK(tree.nodes[0].value == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("logistic gradients at a zero logit") {
    double g = 0.0;
    double h = 0.0;
    logistic_grad_hess(0.0, 1.0, g, h);
    CHECK(g == doctest::Approx(-0.5));
    CHECK(h == doctest::Approx(0.25));
    logistic_grad_hess(0.0, 0.0, g, h);
    CHECK(g == doctest::Approx(0.5));
    CHECK(h == doctest::Approx(0.25));
}

TEST_CASE("logistic gradients match central finite differences") {
    Rng rng(17);
    const double eps = 1e-4; // large enough that roundoff stays well under the 1e-5 gate
    for (int i = 0; i < 100; ++i) {
        const double z = rng.next_uniform(-6.0, 6.0);
        const double y = rng.next_below(2) == 1 ? 1.0 : 0.0;
        auto loss = [&](double logit) { return std::log1p(std::exp(logit)) - y * logit; };
        const double g_fd = (loss(z + eps) - loss(z - eps)) / (2.0 * eps);
        const double h_fd = (loss(z + eps) - 2.0 * loss(z) + loss(z - eps)) / (eps * eps);
        double g = 0.0;
        double h = 0.0;
        logistic_grad_hess(z, y, g, h);
        CHECK(std::abs(g - g_fd) < 1e-5);
        CHECK(std::abs(h - h_fd) < 1e-5);
    }
}

TEST_CASE("a single tree forest without bootstrap equals plain fit_tree") {
    const Table t = table({{0.0, 3.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 0.0}});
    const std::vector<std::int32_t> y{0, 0, 1, 1};
    ForestParams params;
    params.n_estimators = 1;
    params.bootstrap = false;
    params.max_features = 2; // scan every column: no RNG involved
    const EnsembleModel forest = fit_random_forest(t.view(), y, params, 5);

    const std::vector<double> w(4, 1.0);
    TreeFitParams tp;
    tp.max_features = 2;
    Rng rng(derive_seed(5, 0));
    const Tree tree = fit_tree(t.view(), all_ids(4), y, w, tp, rng);
    CHECK(forest.trees.size() == 1);
    CHECK(forest.trees[0] == tree);
    CHECK(predict_scores(forest, t.view()) ==
          std::vector<double>{tree.predict_row(t.view().row(0)), tree.predict_row(t.view().row(1)),
                              tree.predict_row(t.view().row(2)), tree.predict_row(t.view().row(3))});
}

TEST_CASE("forest and boosting recover the feature-only synthetic labels") {
    GenSpec spec;
    spec.num_nodes = 600;
    spec.avg_degree = 6.0;
    spec.dim = 6;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::feature_only;
    spec.noise = 0.0;
    spec.seed = 11;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    ForestParams fp; // unlimited depth
    const EnsembleModel forest = fit_random_forest(t.view(), y, fp, 0);
    CHECK(auroc(predict_scores(forest, t.view()), y) >= 0.999);

    BoostParams bp;
    const EnsembleModel boosted = fit_gbt(t.view(), y, bp, 0);
    CHECK(auroc(predict_scores(boosted, t.view()), y) >= 0.999);

    // A depth-unbounded single tree separates the training set exactly.
    ForestParams single;
    single.n_estimators = 1;
    single.bootstrap = false;
    single.max_features = spec.dim;
    const EnsembleModel one_tree = fit_random_forest(t.view(), y, single, 0);
    CHECK(auroc(predict_scores(one_tree, t.view()), y) == doctest::Approx(1.0));
}

TEST_CASE("scores stay inside [0, 1]") {
    GenSpec spec;
    spec.num_nodes = 300;
    spec.avg_degree = 5.0;
    spec.dim = 4;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::neighborhood;
    spec.seed = 3;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    for (const auto& model :
         {fit_random_forest(t.view(), y, {}, 1), fit_gbt(t.view(), y, {}, 1)}) {
        for (double s : predict_scores(model, t.view())) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("learning rate zero keeps every score at sigmoid(base_logit)") {
    const Table t = table({{0.0}, {1.0}, {2.0}, {3.0}});
    const std::vector<std::int32_t> y{0, 1, 0, 1};
    BoostParams params;
    params.learning_rate = 0.0;
    params.n_estimators = 10;
    const EnsembleModel model = fit_gbt(t.view(), y, params, 9);
    for (double s : predict_scores(model, t.view())) CHECK(s == doctest::Approx(0.5));
}

TEST_CASE("a boosted model with zero trees scores the prior everywhere") {
    const Table t = table({{0.0}, {1.0}});
    const std::vector<std::int32_t> y{0, 1};
    BoostParams params;
    params.n_estimators = 0;
    const EnsembleModel model = fit_gbt(t.view(), y, params, 0);
    CHECK(model.trees.empty());
    for (double s : predict_scores(model, t.view())) CHECK(s == 0.5);
}

TEST_CASE("single-leaf models score a constant") {
    EnsembleModel model;
    model.kind = ModelKind::forest;
    model.input_dim = 1;
    model.trees.push_back(Tree{{TreeNode{-1, 0.0, -1, -1, 0.3}}});
    const Table t = table({{0.0}, {5.0}, {-2.0}});
    CHECK(predict_scores(model, t.view()) == std::vector<double>{0.3, 0.3, 0.3});
}

TEST_CASE("duplicated rows get duplicated scores") {
    const Table t = table({{1.0, 2.0}, {1.0, 2.0}, {0.0, 1.0}});
    const std::vector<std::int32_t> y{1, 1, 0};
    const EnsembleModel model = fit_gbt(t.view(), y, {}, 2);
    const auto scores = predict_scores(model, t.view());
    CHECK(scores[0] == scores[1]);
}

TEST_CASE("training loss is non-increasing with full subsample") {
    GenSpec spec;
    spec.num_nodes = 200;
    spec.avg_degree = 4.0;
    spec.dim = 4;
    spec.anomaly_ratio = 0.25;
    spec.mechanism = GenMechanism::neighborhood;
    spec.noise = 0.1; // noisy labels make late rounds non-trivial
    spec.seed = 21;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    BoostParams params;
    params.n_estimators = 30;
    params.subsample = 1.0;
    const EnsembleModel model = fit_gbt(t.view(), y, params, 4);
    double prev = training_logistic_loss(model, t.view(), y, 0);
    for (std::size_t used = 1; used <= model.trees.size(); ++used) {
        const double loss = training_logistic_loss(model, t.view(), y, used);
        CHECK(loss <= prev + 1e-9);
        prev = loss;
    }
}

TEST_CASE("forest prediction variance across seeds shrinks with more trees") {
    GenSpec spec;
    spec.num_nodes = 300;
    spec.avg_degree = 5.0;
    spec.dim = 5;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::neighborhood;
    spec.noise = 0.05;
    spec.seed = 31;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    const std::vector<double> probe = {0.1, -0.2, 0.3, 0.05, -0.4};
    const MatrixView probe_view{probe.data(), 1, 5};

    auto variance_at = [&](std::int32_t n_estimators) {
        std::vector<double> predictions;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            ForestParams params;
            params.n_estimators = n_estimators;
            params.max_depth = 6;
            const EnsembleModel model = fit_random_forest(t.view(), y, params, seed);
            predictions.push_back(predict_scores(model, probe_view)[0]);
        }
        const double mean =
            std::accumulate(predictions.begin(), predictions.end(), 0.0) / predictions.size();
        double var = 0.0;
        for (double p : predictions) var += (p - mean) * (p - mean);
        return var / static_cast<double>(predictions.size());
    };

    const double v1 = variance_at(1);
    const double v10 = variance_at(10);
    const double v100 = variance_at(100);
    const double margin = 1e-4;
    CHECK(v10 <= v1 + margin);
    CHECK(v100 <= v10 + margin);
}

TEST_CASE("positively rescaled features leave ranking metrics unchanged") {
    GenSpec spec;
    spec.num_nodes = 240;
    spec.avg_degree = 5.0;
    spec.dim = 4;
    spec.anomaly_ratio = 0.25;
    spec.mechanism = GenMechanism::neighborhood;
    spec.noise = 0.05;
    spec.seed = 41;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    Table scaled = t;
    for (double& v : scaled.values) v *= 3.7;

    for (int which = 0; which < 2; ++which) {
        EnsembleModel a;
        EnsembleModel b;
        if (which == 0) {
            ForestParams params;
            params.n_estimators = 20;
            a = fit_random_forest(t.view(), y, params, 8);
            b = fit_random_forest(scaled.view(), y, params, 8);
        } else {
            BoostParams params;
            params.n_estimators = 20;
            a = fit_gbt(t.view(), y, params, 8);
            b = fit_gbt(scaled.view(), y, params, 8);
        }
        const MetricReport ra = evaluate(predict_scores(a, t.view()), y);
        const MetricReport rb = evaluate(predict_scores(b, scaled.view()), y);
        CHECK(ra.auroc == rb.auroc);
        CHECK(ra.auprc == rb.auprc);
        CHECK(ra.rec_at_k == rb.rec_at_k);
    }
}

TEST_CASE("fit rejects degenerate inputs") {
    const Table t = table({{0.0}, {1.0}});
    CHECK_THROWS_AS(fit_random_forest(t.view(), std::vector<std::int32_t>{1, 1}, {}, 0),
                    ValidationError);
    CHECK_THROWS_AS(fit_gbt(t.view(), std::vector<std::int32_t>{0, 0}, {}, 0), ValidationError);

    const std::vector<std::int32_t> y{0, 1};
    const std::vector<double> w{1, 1};
    Rng rng(1);
    CHECK_THROWS_AS(fit_tree(t.view(), {}, y, w, {}, rng), ValidationError);

    Table bad = t;
    bad.values[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_random_forest(bad.view(), y, {}, 0), ValidationError);

    const EnsembleModel model = fit_gbt(t.view(), y, {}, 0);
    const Table wide = table({{0.0, 1.0}});
    CHECK_THROWS_AS(predict_scores(model, wide.view()), ValidationError);
}

TEST_CASE("JSON serialization reproduces scores exactly") {
    GenSpec spec;
    spec.num_nodes = 150;
    spec.avg_degree = 5.0;
    spec.dim = 4;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::feature_only;
    spec.seed = 77;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    for (const auto& model :
         {fit_random_forest(t.view(), y, {}, 12), fit_gbt(t.view(), y, {}, 12)}) {
        const nlohmann::json doc = model_to_json(model);
        const EnsembleModel reloaded = model_from_json(nlohmann::json::parse(doc.dump()));
        CHECK(reloaded == model);
        CHECK(predict_scores(reloaded, t.view()) == predict_scores(model, t.view()));
    }
}

TEST_CASE("histogram split mode trains usable and deterministic models") {
    GenSpec spec;
    spec.num_nodes = 600;
    spec.avg_degree = 6.0;
    spec.dim = 6;
    spec.anomaly_ratio = 0.2;
    spec.mechanism = GenMechanism::feature_only;
    spec.seed = 19;
    const Dataset ds = generate(spec);
    const Table t = gathered(ds);
    const std::vector<std::int32_t> y = label_vector(ds);

    BoostParams params;
    params.n_estimators = 30;
    params.split_mode = SplitMode::histogram;
    const EnsembleModel a = fit_gbt(t.view(), y, params, 3);
    const EnsembleModel b = fit_gbt(t.view(), y, params, 3);
    CHECK(a == b);
    CHECK(auroc(predict_scores(a, t.view()), y) >= 0.99);
    for (double s : predict_scores(a, t.view())) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }

    ForestParams fp;
    fp.n_estimators = 20;
    fp.split_mode = SplitMode::histogram;
    const EnsembleModel forest = fit_random_forest(t.view(), y, fp, 3);
    CHECK(auroc(predict_scores(forest, t.view()), y) >= 0.99);

    // Bin-edge thresholds are coarser than exact midpoints; the two modes
    // need not agree.
    CHECK(split_mode_from_string("hist") == SplitMode::histogram);
    CHECK(to_string(SplitMode::exact) == "exact");
}

TEST_CASE("positive class weighting raises anomaly scores") {
    const Table t = table({{0.0}, {0.0}, {0.0}, {1.0}, {1.0}, {1.0}});
    const std::vector<std::int32_t> y{0, 0, 1, 0, 1, 1};
    ForestParams params;
    params.n_estimators = 1;
    params.bootstrap = false;
    params.max_features = 1;
    params.max_depth = 1;

    const EnsembleModel plain = fit_random_forest(t.view(), y, params, 0);
    params.positive_weight = 3.0;
    const EnsembleModel weighted = fit_random_forest(t.view(), y, params, 0);
    // Left leaf holds {0,0,1}: fraction 1/3 unweighted, 3/5 with weight 3.
    const double s0 = predict_scores(plain, t.view())[0];
    const double w0 = predict_scores(weighted, t.view())[0];
    CHECK(s0 == doctest::Approx(1.0 / 3.0));
    CHECK(w0 == doctest::Approx(0.6));
}
