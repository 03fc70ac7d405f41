#pragma once

#include "gad/matrix_view.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gad {

struct KnnParams {
    std::int32_t k = 5; // euclidean metric, fixed

    friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct NaParams {
    std::int32_t num_neighbors = 5;

    friend bool operator==(const NaParams&, const NaParams&) = default;
};

// Exact brute-force k-nearest-neighbor anomaly scoring: the score of a query
// is the fraction of its k nearest training points (euclidean, distance ties
// broken by lower training index) that are anomalous.
std::vector<double> knn_scores(MatrixView train_x, std::span<const std::int32_t> train_y,
                               MatrixView query_x, const KnnParams& params);

// Neighborhood Averaging post-processing: each score is replaced by the mean
// of itself and the scores of its num_neighbors nearest rows in feature
// space (self excluded from the neighbor set, ties by lower index).
// num_neighbors = 0 is the identity; neighbor counts are capped at rows - 1.
std::vector<double> neighborhood_average(std::span<const double> scores, MatrixView features,
                                         const NaParams& params);

} // namespace gad
