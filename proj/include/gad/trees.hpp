#pragma once

#include "gad/matrix_view.hpp"
#include "gad/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gad {

enum class SplitCriterion { gini, entropy };

std::string to_string(SplitCriterion c);
SplitCriterion criterion_from_string(const std::string& name);

// Exact greedy split search is the default and the reference behavior. The
// histogram mode buckets each candidate feature into 256 equal-width bins
// and only considers bin edges as thresholds; it trades split resolution for
// speed on very large inputs and is NOT equivalent to exact search.
enum class SplitMode { exact, histogram };

std::string to_string(SplitMode m);
SplitMode split_mode_from_string(const std::string& name);

// Defaults follow the benchmarked random-forest configuration: 100 trees,
// gini splits, full-size bootstrap samples, sqrt(dim) feature subsets,
// unlimited depth.
struct ForestParams {
    std::int32_t n_estimators = 100;
    SplitCriterion criterion = SplitCriterion::gini;
    double max_samples = 1.0;       // bootstrap sample fraction, (0, 1]
    std::int32_t max_features = 0;  // 0 = ceil(sqrt(dim))
    std::int32_t min_samples_leaf = 1;
    std::int32_t max_depth = -1;    // -1 = unlimited
    double positive_weight = 1.0;
    bool bootstrap = true;          // test hook; false fits each tree on rows 0..ceil(f*n)-1
    SplitMode split_mode = SplitMode::exact;

    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

// Defaults follow the benchmarked gradient-boosting configuration: 100
// rounds, eta 0.3, lambda 1, full subsample, depth 6, zero base logit.
struct BoostParams {
    std::int32_t n_estimators = 100;
    double learning_rate = 0.3;
    double l2_lambda = 1.0;
    double subsample = 1.0;
    std::int32_t max_depth = 6;
    double base_logit = 0.0;
    double positive_weight = 1.0;
    SplitMode split_mode = SplitMode::exact;

    friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

// Flat binary tree. Internal nodes route left iff x[feature] <= threshold;
// feature == -1 marks a leaf carrying value.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict_row(std::span<const double> row) const {
        std::int32_t at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& node = nodes[static_cast<std::size_t>(at)];
            at = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                               : node.right;
        }
        return nodes[static_cast<std::size_t>(at)].value;
    }

    friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeFitParams {
    SplitCriterion criterion = SplitCriterion::gini;
    std::int32_t max_features = 0; // 0 = all columns
    std::int32_t min_samples_leaf = 1;
    std::int32_t max_depth = -1;   // -1 = unlimited
    double l2_lambda = 1.0;        // boosting mode only
    std::int32_t histogram_bins = 0; // 0 = exact greedy search
};

// Classification mode: exact greedy CART split search over a uniformly
// sampled feature subset per node. sample_ids is the node's sample multiset
// (bootstrap duplicates appear repeatedly); y and weights are indexed by row
// id. Leaf value is the weighted positive fraction.
Tree fit_tree(MatrixView X, std::span<const std::int64_t> sample_ids,
              std::span<const std::int32_t> y, std::span<const double> weights,
              const TreeFitParams& params, Rng& rng);

// Boosting mode: split gain is the second-order formula
// 0.5*[GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)], leaf value -G/(H+l),
// growth stops when the best gain is non-positive.
Tree fit_tree(MatrixView X, std::span<const std::int64_t> sample_ids,
              std::span<const double> grad, std::span<const double> hess,
              const TreeFitParams& params, Rng& rng);

enum class ModelKind { forest, boosted };

// Trained ensemble; scores are always in [0, 1] (leaf fractions for forests,
// sigmoid of summed shrunk leaves for boosting).
struct EnsembleModel {
    ModelKind kind = ModelKind::forest;
    std::int32_t input_dim = 0;
    ForestParams forest_params;
    BoostParams boost_params;
    std::vector<Tree> trees;

    friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

EnsembleModel fit_random_forest(MatrixView X, std::span<const std::int32_t> y,
                                const ForestParams& params, std::uint64_t seed);

EnsembleModel fit_gbt(MatrixView X, std::span<const std::int32_t> y, const BoostParams& params,
                      std::uint64_t seed);

std::vector<double> predict_scores(const EnsembleModel& model, MatrixView X);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Gradient and hessian of the logistic loss l(z, y) = log(1 + e^z) - y*z:
// g = sigmoid(z) - y, h = sigmoid(z) * (1 - sigmoid(z)).
inline void logistic_grad_hess(double logit, double y, double& g, double& h) {
    const double p = sigmoid(logit);
    g = p - y;
    h = p * (1.0 - p);
}

// Self-describing JSON round-trip; reloaded models reproduce scores exactly.
nlohmann::json model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const nlohmann::json& doc);

} // namespace gad
