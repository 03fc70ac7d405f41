#include "gad/baselines.hpp"

#include "gad/error.hpp"
#include "gad/parallel.hpp"

#include <algorithm>
#include <string>

namespace gad {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

// k smallest (distance, index) pairs from query to every row of data,
// optionally skipping one row (self). Lexicographic pair order makes the
// lower index win distance ties.
void nearest_rows(MatrixView data, std::span<const double> query, std::int32_t k,
                  std::int64_t skip_row, std::vector<std::pair<double, std::int64_t>>& heap) {
    heap.clear();
    auto worse = [](const std::pair<double, std::int64_t>& a,
                    const std::pair<double, std::int64_t>& b) { return a < b; };
    for (std::int64_t i = 0; i < data.rows; ++i) {
        if (i == skip_row) continue;
        const std::pair<double, std::int64_t> cand{squared_distance(query, data.row(i)), i};
        if (static_cast<std::int32_t>(heap.size()) < k) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    }
}

} // namespace

std::vector<double> knn_scores(MatrixView train_x, std::span<const std::int32_t> train_y,
                               MatrixView query_x, const KnnParams& params) {
    if (train_x.cols != query_x.cols) {
        throw ValidationError("knn_scores: train dim " + std::to_string(train_x.cols) +
                              " != query dim " + std::to_string(query_x.cols));
    }
    if (static_cast<std::int64_t>(train_y.size()) != train_x.rows) {
        throw ValidationError("knn_scores: label count does not match training rows");
    }
    if (params.k < 1 || static_cast<std::int64_t>(params.k) > train_x.rows) {
        throw ValidationError("knn_scores: k = " + std::to_string(params.k) +
                              " exceeds training size " + std::to_string(train_x.rows));
    }

    std::vector<double> scores(static_cast<std::size_t>(query_x.rows), 0.0);
    parallel_for(query_x.rows, [&](std::int64_t begin, std::int64_t end) {
        std::vector<std::pair<double, std::int64_t>> heap;
        heap.reserve(static_cast<std::size_t>(params.k) + 1);
        for (std::int64_t q = begin; q < end; ++q) {
            nearest_rows(train_x, query_x.row(q), params.k, -1, heap);
            std::int64_t positives = 0;
            for (const auto& [dist, idx] : heap) {
                positives += train_y[static_cast<std::size_t>(idx)];
            }
            scores[static_cast<std::size_t>(q)] =
                static_cast<double>(positives) / static_cast<double>(params.k);
        }
    });
    return scores;
}

std::vector<double> neighborhood_average(std::span<const double> scores, MatrixView features,
                                         const NaParams& params) {
    if (static_cast<std::int64_t>(scores.size()) != features.rows) {
        throw ValidationError("neighborhood_average: score count " +
                              std::to_string(scores.size()) + " does not match rows " +
                              std::to_string(features.rows));
    }
    if (params.num_neighbors < 0) {
        throw ValidationError("neighborhood_average: num_neighbors must be non-negative");
    }
    const std::int32_t k = static_cast<std::int32_t>(std::min<std::int64_t>(
        params.num_neighbors, features.rows > 0 ? features.rows - 1 : 0));
    if (k == 0) return {scores.begin(), scores.end()};

    std::vector<double> out(scores.size(), 0.0);
    parallel_for(features.rows, [&](std::int64_t begin, std::int64_t end) {
        std::vector<std::pair<double, std::int64_t>> heap;
        heap.reserve(static_cast<std::size_t>(k) + 1);
        for (std::int64_t i = begin; i < end; ++i) {
            nearest_rows(features, features.row(i), k, i, heap);
            double acc = scores[static_cast<std::size_t>(i)];
            for (const auto& [dist, idx] : heap) {
                acc += scores[static_cast<std::size_t>(idx)];
            }
            out[static_cast<std::size_t>(i)] = acc / static_cast<double>(k + 1);
        }
    });
    return out;
}

} // namespace gad
