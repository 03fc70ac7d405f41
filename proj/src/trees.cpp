#include "gad/trees.hpp"

#include "gad/error.hpp"
#include "gad/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace gad {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double impurity(double w_pos, double w_total, SplitCriterion criterion) {
    const double p = w_pos / w_total;
    if (criterion == SplitCriterion::gini) {
        return 2.0 * p * (1.0 - p);
    }
    double e = 0.0;
    if (p > 0.0) e -= p * std::log(p);
    if (p < 1.0) e -= (1.0 - p) * std::log(1.0 - p);
    return e;
}

struct SplitChoice {
    double score = kNegInf; // weighted impurity decrease / boosting gain
    std::int32_t feature = -1;
    double threshold = 0.0;

    bool valid() const { return feature >= 0; }
};

// Threshold between two consecutive distinct sorted values: the midpoint,
// nudged back to lo when rounding lands it on hi so that "x <= threshold"
// reproduces the scanned partition exactly.
double midpoint_threshold(double lo, double hi) {
    double t = lo + (hi - lo) / 2.0;
    if (!(t < hi)) t = lo;
    if (t < lo) t = lo;
    return t;
}

class TreeBuilder {
public:
    enum class Mode { classification, boosting };

    TreeBuilder(MatrixView x, Mode mode, const TreeFitParams& params, Rng& rng,
                std::span<const std::int32_t> y, std::span<const double> weights,
                std::span<const double> grad, std::span<const double> hess)
        : x_(x), mode_(mode), params_(params), rng_(rng), y_(y), weights_(weights), grad_(grad),
          hess_(hess) {
        feature_pool_.resize(static_cast<std::size_t>(x_.cols));
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
        const std::int32_t all = x_.cols;
        num_candidates_ = params_.max_features > 0 ? std::min(params_.max_features, all) : all;
    }

    Tree build(std::span<const std::int64_t> sample_ids) {
        if (sample_ids.empty()) throw ValidationError("fit_tree: empty sample set");
        samples_.assign(sample_ids.begin(), sample_ids.end());
        Tree tree;
        grow(tree, 0, static_cast<std::int64_t>(samples_.size()), 0);
        return tree;
    }

private:
    std::int32_t grow(Tree& tree, std::int64_t begin, std::int64_t end, std::int32_t depth) {
        const std::int64_t count = end - begin;
        const std::int32_t index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        double leaf_value = 0.0;
        bool must_stop = false;

        if (mode_ == Mode::classification) {
            double w_total = 0.0;
            double w_pos = 0.0;
            bool pure = true;
            const std::int32_t first_label = y_[static_cast<std::size_t>(samples_[static_cast<std::size_t>(begin)])];
            for (std::int64_t k = begin; k < end; ++k) {
                const auto id = static_cast<std::size_t>(samples_[static_cast<std::size_t>(k)]);
                const double w = weights_[id];
                w_total += w;
                if (y_[id] == 1) w_pos += w;
                if (y_[id] != first_label) pure = false;
            }
            leaf_value = w_pos / w_total;
            must_stop = pure;
        } else {
            double g_total = 0.0;
            double h_total = 0.0;
            for (std::int64_t k = begin; k < end; ++k) {
                const auto id = static_cast<std::size_t>(samples_[static_cast<std::size_t>(k)]);
                if (!std::isfinite(grad_[id]) || !std::isfinite(hess_[id])) {
                    throw ValidationError("fit_tree: non-finite gradient or hessian at row " +
                                          std::to_string(id));
                }
                g_total += grad_[id];
                h_total += hess_[id];
            }
            leaf_value = -g_total / (h_total + params_.l2_lambda);
        }

        if (!must_stop) {
            must_stop = (params_.max_depth >= 0 && depth >= params_.max_depth) ||
                        count < 2 * static_cast<std::int64_t>(params_.min_samples_leaf) || count < 2;
        }

        SplitChoice best;
        if (!must_stop) {
            best = find_best_split(begin, end);
        }
        if (must_stop || !best.valid()) {
            tree.nodes[static_cast<std::size_t>(index)].value = leaf_value;
            return index;
        }

        // Stable partition keeps a canonical sample order on both sides.
        const auto mid_it = std::stable_partition(
            samples_.begin() + begin, samples_.begin() + end, [&](std::int64_t id) {
                return x_.at(id, best.feature) <= best.threshold;
            });
        const std::int64_t mid = mid_it - samples_.begin();
        if (mid == begin || mid == end) {
            // Histogram edges can disagree with actual routing at FP bin
            // boundaries; never emit an empty child.
            tree.nodes[static_cast<std::size_t>(index)].value = leaf_value;
            return index;
        }

        tree.nodes[static_cast<std::size_t>(index)].feature = best.feature;
        tree.nodes[static_cast<std::size_t>(index)].threshold = best.threshold;
        const std::int32_t left = grow(tree, begin, mid, depth + 1);
        const std::int32_t right = grow(tree, mid, end, depth + 1);
        tree.nodes[static_cast<std::size_t>(index)].left = left;
        tree.nodes[static_cast<std::size_t>(index)].right = right;
        return index;
    }

    // Draws the candidate subset (uniform, without replacement), scans each
    // candidate, and keeps the best by (score, lower feature, lower
    // threshold). Candidates are scanned in ascending feature order with
    // strict improvement, which realizes the tie-break rule.
    SplitChoice find_best_split(std::int64_t begin, std::int64_t end) {
        std::span<const std::int32_t> candidates;
        if (num_candidates_ >= x_.cols) {
            candidates = {feature_pool_.data(), static_cast<std::size_t>(x_.cols)};
        } else {
            for (std::int32_t k = 0; k < num_candidates_; ++k) {
                const auto j = static_cast<std::size_t>(
                    rng_.next_int(k, static_cast<std::int64_t>(x_.cols) - 1));
                std::swap(feature_pool_[static_cast<std::size_t>(k)], feature_pool_[j]);
            }
            std::sort(feature_pool_.begin(), feature_pool_.begin() + num_candidates_);
            candidates = {feature_pool_.data(), static_cast<std::size_t>(num_candidates_)};
        }

        SplitChoice best;
        for (std::int32_t feature : candidates) {
            scan_feature(begin, end, feature, best);
        }
        return best;
    }

    void scan_feature(std::int64_t begin, std::int64_t end, std::int32_t feature,
                      SplitChoice& best) {
        if (params_.histogram_bins > 0) {
            scan_feature_histogram(begin, end, feature, best);
            return;
        }
        const std::size_t n = static_cast<std::size_t>(end - begin);
        sorted_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::int64_t id = samples_[static_cast<std::size_t>(begin) + k];
            sorted_[k] = {x_.at(id, feature), id};
        }
        std::sort(sorted_.begin(), sorted_.end());
        if (sorted_.front().first == sorted_.back().first) return; // constant column

        if (mode_ == Mode::classification) {
            double w_total = 0.0;
            double wp_total = 0.0;
            for (const auto& [v, id] : sorted_) {
                w_total += weights_[static_cast<std::size_t>(id)];
                wp_total += y_[static_cast<std::size_t>(id)] == 1
                                ? weights_[static_cast<std::size_t>(id)]
                                : 0.0;
            }
            const double parent = w_total * impurity(wp_total, w_total, params_.criterion);
            double w_left = 0.0;
            double wp_left = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const auto id = static_cast<std::size_t>(sorted_[k].second);
                w_left += weights_[id];
                if (y_[id] == 1) wp_left += weights_[id];
                if (sorted_[k].first == sorted_[k + 1].first) continue;
                const std::int64_t left_count = static_cast<std::int64_t>(k) + 1;
                const std::int64_t right_count = static_cast<std::int64_t>(n) - left_count;
                if (left_count < params_.min_samples_leaf || right_count < params_.min_samples_leaf)
                    continue;
                const double w_right = w_total - w_left;
                const double decrease = parent -
                                        w_left * impurity(wp_left, w_left, params_.criterion) -
                                        w_right * impurity(wp_total - wp_left, w_right,
                                                           params_.criterion);
                if (decrease > best.score) {
                    best = {decrease, feature,
                            midpoint_threshold(sorted_[k].first, sorted_[k + 1].first)};
                }
            }
        } else {
            double g_total = 0.0;
            double h_total = 0.0;
            for (const auto& [v, id] : sorted_) {
                g_total += grad_[static_cast<std::size_t>(id)];
                h_total += hess_[static_cast<std::size_t>(id)];
            }
            const double lambda = params_.l2_lambda;
            const double parent = g_total * g_total / (h_total + lambda);
            double g_left = 0.0;
            double h_left = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const auto id = static_cast<std::size_t>(sorted_[k].second);
                g_left += grad_[id];
                h_left += hess_[id];
                if (sorted_[k].first == sorted_[k + 1].first) continue;
                const std::int64_t left_count = static_cast<std::int64_t>(k) + 1;
                const std::int64_t right_count = static_cast<std::int64_t>(n) - left_count;
                if (left_count < params_.min_samples_leaf || right_count < params_.min_samples_leaf)
                    continue;
                const double g_right = g_total - g_left;
                const double h_right = h_total - h_left;
                const double gain = 0.5 * (g_left * g_left / (h_left + lambda) +
                                           g_right * g_right / (h_right + lambda) - parent);
                // Growth stops at non-positive gain (gamma = 0 pruning), so
                // only strictly positive gains are candidates.
                if (gain > 0.0 && gain > best.score) {
                    best = {gain, feature,
                            midpoint_threshold(sorted_[k].first, sorted_[k + 1].first)};
                }
            }
        }
    }

    // Histogram split scan: equal-width bins over the node's value range,
    // thresholds only at bin edges. Coarser than exact search by design;
    // samples sitting exactly on an edge may route one bin off the scanned
    // statistics, so children are re-checked for emptiness by the caller.
    void scan_feature_histogram(std::int64_t begin, std::int64_t end, std::int32_t feature,
                                SplitChoice& best) {
        const std::size_t n = static_cast<std::size_t>(end - begin);
        const std::size_t bins = static_cast<std::size_t>(params_.histogram_bins);
        double lo = x_.at(samples_[static_cast<std::size_t>(begin)], feature);
        double hi = lo;
        for (std::int64_t k = begin + 1; k < end; ++k) {
            const double v = x_.at(samples_[static_cast<std::size_t>(k)], feature);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) return;
        const double width = (hi - lo) / static_cast<double>(bins);

        bin_a_.assign(bins, 0.0);
        bin_b_.assign(bins, 0.0);
        bin_count_.assign(bins, 0);
        for (std::int64_t k = begin; k < end; ++k) {
            const auto id = static_cast<std::size_t>(samples_[static_cast<std::size_t>(k)]);
            const double v = x_.at(static_cast<std::int64_t>(id), feature);
            auto b = static_cast<std::size_t>((v - lo) / width);
            if (b >= bins) b = bins - 1;
            if (mode_ == Mode::classification) {
                bin_a_[b] += weights_[id];
                bin_b_[b] += y_[id] == 1 ? weights_[id] : 0.0;
            } else {
                bin_a_[b] += grad_[id];
                bin_b_[b] += hess_[id];
            }
            ++bin_count_[b];
        }

        double a_total = 0.0;
        double b_total = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            a_total += bin_a_[b];
            b_total += bin_b_[b];
        }

        const double lambda = params_.l2_lambda;
        const double parent = mode_ == Mode::classification
                                  ? a_total * impurity(b_total, a_total, params_.criterion)
                                  : a_total * a_total / (b_total + lambda);
        double a_left = 0.0;
        double b_left = 0.0;
        std::int64_t count_left = 0;
        for (std::size_t b = 0; b + 1 < bins; ++b) {
            a_left += bin_a_[b];
            b_left += bin_b_[b];
            count_left += bin_count_[b];
            if (count_left == 0) continue;
            const std::int64_t count_right = static_cast<std::int64_t>(n) - count_left;
            if (count_right == 0) break;
            if (count_left < params_.min_samples_leaf || count_right < params_.min_samples_leaf)
                continue;
            const double threshold = lo + width * static_cast<double>(b + 1);
            if (mode_ == Mode::classification) {
                const double w_right = a_total - a_left;
                const double decrease = parent -
                                        a_left * impurity(b_left, a_left, params_.criterion) -
                                        w_right * impurity(b_total - b_left, w_right,
                                                           params_.criterion);
                if (decrease > best.score) best = {decrease, feature, threshold};
            } else {
                const double g_right = a_total - a_left;
                const double h_right = b_total - b_left;
                const double gain = 0.5 * (a_left * a_left / (b_left + lambda) +
                                           g_right * g_right / (h_right + lambda) - parent);
                if (gain > 0.0 && gain > best.score) best = {gain, feature, threshold};
            }
        }
    }

    MatrixView x_;
    Mode mode_;
    TreeFitParams params_;
    Rng& rng_;
    std::span<const std::int32_t> y_;
    std::span<const double> weights_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    std::vector<std::int64_t> samples_;
    std::vector<std::pair<double, std::int64_t>> sorted_;
    std::vector<double> bin_a_;  // weight sums / gradient sums per bin
    std::vector<double> bin_b_;  // weighted positives / hessian sums per bin
    std::vector<std::int64_t> bin_count_;
    std::vector<std::int32_t> feature_pool_;
    std::int32_t num_candidates_ = 0;
};

void check_finite_rows(MatrixView x, std::span<const std::int64_t> ids) {
    for (std::int64_t id : ids) {
        for (double v : x.row(id)) {
            if (!std::isfinite(v)) {
                throw ValidationError("fit_tree: non-finite feature value at row " +
                                      std::to_string(id));
            }
        }
    }
}

void check_finite_matrix(MatrixView x, const char* who) {
    const std::size_t total = static_cast<std::size_t>(x.rows) * static_cast<std::size_t>(x.cols);
    for (std::size_t k = 0; k < total; ++k) {
        if (!std::isfinite(x.data[k])) {
            throw ValidationError(std::string(who) + ": non-finite feature value at row " +
                                  std::to_string(k / static_cast<std::size_t>(x.cols)));
        }
    }
}

void check_both_classes(std::span<const std::int32_t> y, const char* who) {
    bool pos = false;
    bool neg = false;
    for (std::int32_t v : y) {
        if (v == 1) pos = true;
        else if (v == 0) neg = true;
        else throw ValidationError(std::string(who) + ": labels must be 0 or 1");
    }
    if (!pos || !neg) {
        throw ValidationError(std::string(who) + ": both classes must be present");
    }
}

std::vector<std::int64_t> iota_ids(std::int64_t n) {
    std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), std::int64_t{0});
    return ids;
}

} // namespace

std::string to_string(SplitCriterion c) {
    return c == SplitCriterion::gini ? "gini" : "entropy";
}

std::string to_string(SplitMode m) { return m == SplitMode::exact ? "exact" : "hist"; }

SplitMode split_mode_from_string(const std::string& name) {
    if (name == "exact") return SplitMode::exact;
    if (name == "hist" || name == "histogram") return SplitMode::histogram;
    throw ValidationError("unknown split mode '" + name + "' (expected exact or hist)");
}

SplitCriterion criterion_from_string(const std::string& name) {
    if (name == "gini") return SplitCriterion::gini;
    if (name == "entropy") return SplitCriterion::entropy;
    throw ValidationError("unknown split criterion '" + name + "' (expected gini or entropy)");
}

Tree fit_tree(MatrixView X, std::span<const std::int64_t> sample_ids,
              std::span<const std::int32_t> y, std::span<const double> weights,
              const TreeFitParams& params, Rng& rng) {
    check_finite_rows(X, sample_ids);
    TreeBuilder builder(X, TreeBuilder::Mode::classification, params, rng, y, weights, {}, {});
    return builder.build(sample_ids);
}

Tree fit_tree(MatrixView X, std::span<const std::int64_t> sample_ids,
              std::span<const double> grad, std::span<const double> hess,
              const TreeFitParams& params, Rng& rng) {
    check_finite_rows(X, sample_ids);
    TreeBuilder builder(X, TreeBuilder::Mode::boosting, params, rng, {}, {}, grad, hess);
    return builder.build(sample_ids);
}

EnsembleModel fit_random_forest(MatrixView X, std::span<const std::int32_t> y,
                                const ForestParams& params, std::uint64_t seed) {
    if (X.rows < 1) throw ValidationError("fit_random_forest: empty input");
    if (static_cast<std::int64_t>(y.size()) != X.rows) {
        throw ValidationError("fit_random_forest: label count does not match rows");
    }
    check_both_classes(y, "fit_random_forest");
    check_finite_matrix(X, "fit_random_forest");
    if (params.n_estimators < 1) throw ValidationError("n_estimators must be positive");
    if (!(params.max_samples > 0.0) || params.max_samples > 1.0) {
        throw ValidationError("max_samples must be in (0, 1]");
    }
    if (!(params.positive_weight > 0.0)) {
        throw ValidationError("positive_weight must be positive");
    }

    std::vector<double> weights(static_cast<std::size_t>(X.rows), 1.0);
    if (params.positive_weight != 1.0) {
        for (std::int64_t i = 0; i < X.rows; ++i) {
            if (y[static_cast<std::size_t>(i)] == 1) {
                weights[static_cast<std::size_t>(i)] = params.positive_weight;
            }
        }
    }

    TreeFitParams tree_params;
    tree_params.criterion = params.criterion;
    tree_params.max_features =
        params.max_features > 0
            ? params.max_features
            : static_cast<std::int32_t>(std::ceil(std::sqrt(static_cast<double>(X.cols))));
    tree_params.min_samples_leaf = params.min_samples_leaf;
    tree_params.max_depth = params.max_depth;
    tree_params.histogram_bins = params.split_mode == SplitMode::histogram ? 256 : 0;

    const auto n_draws = static_cast<std::int64_t>(
        std::ceil(params.max_samples * static_cast<double>(X.rows)));

    EnsembleModel model;
    model.kind = ModelKind::forest;
    model.input_dim = X.cols;
    model.forest_params = params;
    model.trees.resize(static_cast<std::size_t>(params.n_estimators));

    parallel_for(params.n_estimators, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t t = begin; t < end; ++t) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
            std::vector<std::int64_t> ids;
            ids.reserve(static_cast<std::size_t>(n_draws));
            if (params.bootstrap) {
                for (std::int64_t k = 0; k < n_draws; ++k) {
                    ids.push_back(static_cast<std::int64_t>(
                        rng.next_below(static_cast<std::uint64_t>(X.rows))));
                }
            } else {
                for (std::int64_t k = 0; k < n_draws; ++k) ids.push_back(k);
            }
            TreeBuilder builder(X, TreeBuilder::Mode::classification, tree_params, rng, y, weights,
                                {}, {});
            model.trees[static_cast<std::size_t>(t)] = builder.build(ids);
        }
    });
    return model;
}

EnsembleModel fit_gbt(MatrixView X, std::span<const std::int32_t> y, const BoostParams& params,
                      std::uint64_t seed) {
    if (X.rows < 1) throw ValidationError("fit_gbt: empty input");
    if (static_cast<std::int64_t>(y.size()) != X.rows) {
        throw ValidationError("fit_gbt: label count does not match rows");
    }
    check_both_classes(y, "fit_gbt");
    check_finite_matrix(X, "fit_gbt");
    if (params.n_estimators < 0) throw ValidationError("n_estimators must be non-negative");
    if (!(params.subsample > 0.0) || params.subsample > 1.0) {
        throw ValidationError("subsample must be in (0, 1]");
    }
    if (!(params.positive_weight > 0.0)) {
        throw ValidationError("positive_weight must be positive");
    }

    TreeFitParams tree_params;
    tree_params.max_features = 0; // boosting scans every column
    tree_params.min_samples_leaf = 1;
    tree_params.max_depth = params.max_depth;
    tree_params.l2_lambda = params.l2_lambda;
    tree_params.histogram_bins = params.split_mode == SplitMode::histogram ? 256 : 0;

    const std::size_t n = static_cast<std::size_t>(X.rows);
    std::vector<double> logits(n, params.base_logit);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    const auto all_ids = iota_ids(X.rows);
    const auto n_sub =
        static_cast<std::int64_t>(std::ceil(params.subsample * static_cast<double>(X.rows)));

    EnsembleModel model;
    model.kind = ModelKind::boosted;
    model.input_dim = X.cols;
    model.boost_params = params;
    model.trees.reserve(static_cast<std::size_t>(params.n_estimators));

    std::vector<std::int64_t> round_ids;
    for (std::int32_t round = 0; round < params.n_estimators; ++round) {
        parallel_for(X.rows, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t i = begin; i < end; ++i) {
                const auto k = static_cast<std::size_t>(i);
                const double target = y[k] == 1 ? 1.0 : 0.0;
                logistic_grad_hess(logits[k], target, grad[k], hess[k]);
                if (params.positive_weight != 1.0 && y[k] == 1) {
                    grad[k] *= params.positive_weight;
                    hess[k] *= params.positive_weight;
                }
            }
        });

        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(round)));
        std::span<const std::int64_t> fit_ids;
        if (n_sub >= X.rows) {
            fit_ids = all_ids;
        } else {
            round_ids = all_ids;
            for (std::int64_t k = 0; k < n_sub; ++k) {
                const auto j = static_cast<std::size_t>(rng.next_int(k, X.rows - 1));
                std::swap(round_ids[static_cast<std::size_t>(k)], round_ids[j]);
            }
            round_ids.resize(static_cast<std::size_t>(n_sub));
            std::sort(round_ids.begin(), round_ids.end());
            fit_ids = round_ids;
        }

        TreeBuilder builder(X, TreeBuilder::Mode::boosting, tree_params, rng, {}, {}, grad, hess);
        Tree tree = builder.build(fit_ids);

        parallel_for(X.rows, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t i = begin; i < end; ++i) {
                logits[static_cast<std::size_t>(i)] +=
                    params.learning_rate * tree.predict_row(X.row(i));
            }
        });
        for (double z : logits) {
            if (!std::isfinite(z)) {
                throw ValidationError("fit_gbt: training diverged (non-finite logit at round " +
                                      std::to_string(round) + ")");
            }
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::vector<double> predict_scores(const EnsembleModel& model, MatrixView X) {
    if (X.cols != model.input_dim) {
        throw ValidationError("predict_scores: input dim " + std::to_string(X.cols) +
                              " does not match training dim " + std::to_string(model.input_dim));
    }
    std::vector<double> scores(static_cast<std::size_t>(X.rows), 0.0);
    parallel_for(X.rows, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            const auto row = X.row(i);
            double acc = 0.0;
            for (const Tree& tree : model.trees) acc += tree.predict_row(row);
            if (model.kind == ModelKind::forest) {
                scores[static_cast<std::size_t>(i)] =
                    model.trees.empty() ? 0.0 : acc / static_cast<double>(model.trees.size());
            } else {
                scores[static_cast<std::size_t>(i)] =
                    sigmoid(model.boost_params.base_logit + model.boost_params.learning_rate * acc);
            }
        }
    });
    return scores;
}

nlohmann::json model_to_json(const EnsembleModel& model) {
    nlohmann::json doc;
    doc["kind"] = model.kind == ModelKind::forest ? "forest" : "boosted";
    doc["input_dim"] = model.input_dim;
    if (model.kind == ModelKind::forest) {
        const auto& p = model.forest_params;
        doc["params"] = {{"n_estimators", p.n_estimators},
                         {"criterion", to_string(p.criterion)},
                         {"max_samples", p.max_samples},
                         {"max_features", p.max_features},
                         {"min_samples_leaf", p.min_samples_leaf},
                         {"max_depth", p.max_depth},
                         {"positive_weight", p.positive_weight},
                         {"bootstrap", p.bootstrap},
                         {"split_mode", to_string(p.split_mode)}};
    } else {
        const auto& p = model.boost_params;
        doc["params"] = {{"n_estimators", p.n_estimators},
                         {"learning_rate", p.learning_rate},
                         {"l2_lambda", p.l2_lambda},
                         {"subsample", p.subsample},
                         {"max_depth", p.max_depth},
                         {"base_logit", p.base_logit},
                         {"positive_weight", p.positive_weight},
                         {"split_mode", to_string(p.split_mode)}};
    }
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : model.trees) {
        nlohmann::json t;
        auto& feature = t["feature"] = nlohmann::json::array();
        auto& threshold = t["threshold"] = nlohmann::json::array();
        auto& left = t["left"] = nlohmann::json::array();
        auto& right = t["right"] = nlohmann::json::array();
        auto& value = t["value"] = nlohmann::json::array();
        for (const TreeNode& node : tree.nodes) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            value.push_back(node.value);
        }
        trees.push_back(std::move(t));
    }
    doc["trees"] = std::move(trees);
    return doc;
}

EnsembleModel model_from_json(const nlohmann::json& doc) {
    EnsembleModel model;
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "forest") model.kind = ModelKind::forest;
    else if (kind == "boosted") model.kind = ModelKind::boosted;
    else throw ValidationError("model_from_json: unknown kind '" + kind + "'");
    model.input_dim = doc.at("input_dim").get<std::int32_t>();

    const auto& p = doc.at("params");
    if (model.kind == ModelKind::forest) {
        ForestParams fp;
        fp.n_estimators = p.at("n_estimators").get<std::int32_t>();
        fp.criterion = criterion_from_string(p.at("criterion").get<std::string>());
        fp.max_samples = p.at("max_samples").get<double>();
        fp.max_features = p.at("max_features").get<std::int32_t>();
        fp.min_samples_leaf = p.at("min_samples_leaf").get<std::int32_t>();
        fp.max_depth = p.at("max_depth").get<std::int32_t>();
        fp.positive_weight = p.at("positive_weight").get<double>();
        fp.bootstrap = p.at("bootstrap").get<bool>();
        fp.split_mode = split_mode_from_string(p.at("split_mode").get<std::string>());
        model.forest_params = fp;
    } else {
        BoostParams bp;
        bp.n_estimators = p.at("n_estimators").get<std::int32_t>();
        bp.learning_rate = p.at("learning_rate").get<double>();
        bp.l2_lambda = p.at("l2_lambda").get<double>();
        bp.subsample = p.at("subsample").get<double>();
        bp.max_depth = p.at("max_depth").get<std::int32_t>();
        bp.base_logit = p.at("base_logit").get<double>();
        bp.positive_weight = p.at("positive_weight").get<double>();
        bp.split_mode = split_mode_from_string(p.at("split_mode").get<std::string>());
        model.boost_params = bp;
    }

    for (const auto& t : doc.at("trees")) {
        const auto& feature = t.at("feature");
        const auto& threshold = t.at("threshold");
        const auto& left = t.at("left");
        const auto& right = t.at("right");
        const auto& value = t.at("value");
        Tree tree;
        tree.nodes.resize(feature.size());
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            tree.nodes[i].feature = feature.at(i).get<std::int32_t>();
            tree.nodes[i].threshold = threshold.at(i).get<double>();
            tree.nodes[i].left = left.at(i).get<std::int32_t>();
            tree.nodes[i].right = right.at(i).get<std::int32_t>();
            tree.nodes[i].value = value.at(i).get<double>();
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

} // namespace gad
