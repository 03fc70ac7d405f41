#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gad {

struct MetricReport {
    double auroc = 0.0;
    double auprc = 0.0;
    double rec_at_k = 0.0;
    std::int64_t k = 0;
    std::int64_t num_pos = 0;
    std::int64_t num_neg = 0;
    double fit_seconds = 0.0;
    std::int64_t peak_memory_bytes = 0;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Mann-Whitney AUROC: fraction of (positive, negative) pairs where the
// positive outscores the negative, tied pairs counted half. Needs at least
// one label of each class. labels hold 0/1.
double auroc(std::span<const double> scores, std::span<const std::int32_t> labels);

// Average precision with thresholds at distinct score values in descending
// order: AP = sum over thresholds of (recall increase) * precision, with
// equal scores grouped into a single threshold.
double average_precision(std::span<const double> scores, std::span<const std::int32_t> labels);

// Fraction of all positives among the top-k scores. Ties at the k-th
// boundary are broken by ascending position index, so the result is
// deterministic.
double recall_at_k(std::span<const double> scores, std::span<const std::int32_t> labels,
                   std::int64_t k);

// Bundles the three metrics with k = number of positives. Timing and memory
// come from the caller's instrumentation.
MetricReport evaluate(std::span<const double> scores, std::span<const std::int32_t> labels,
                      double fit_seconds = 0.0, std::int64_t peak_memory_bytes = 0);

// Best-effort peak RSS of this process in bytes; 0 where unsupported.
std::int64_t current_peak_memory_bytes();

} // namespace gad
