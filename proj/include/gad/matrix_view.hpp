#pragma once

#include "gad/aggregate.hpp"
#include "gad/dataset.hpp"

#include <cstdint>
#include <span>

namespace gad {

// Non-owning row-major view; the glue between feature containers and the
// learners.
struct MatrixView {
    const double* data = nullptr;
    std::int64_t rows = 0;
    std::int32_t cols = 0;

    std::span<const double> row(std::int64_t i) const {
        return {data + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }

    double at(std::int64_t i, std::int32_t j) const {
        return data[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
    }

    static MatrixView of(const FeatureMatrix& m) {
        return {m.num_nodes() > 0 ? m.row(0).data() : nullptr, m.num_nodes(), m.dim()};
    }

    static MatrixView of(const StackedFeatures& s) { return of(s.values); }
};

} // namespace gad
