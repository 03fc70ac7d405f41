#include "gad/metrics.hpp"

#include "gad/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

namespace gad {

namespace {

struct ClassCounts {
    std::int64_t pos = 0;
    std::int64_t neg = 0;
};

ClassCounts count_classes(std::span<const double> scores, std::span<const std::int32_t> labels) {
    if (scores.size() != labels.size()) {
        throw ValidationError("scores and labels length mismatch: " + std::to_string(scores.size()) +
                              " vs " + std::to_string(labels.size()));
    }
    ClassCounts c;
    for (std::int32_t y : labels) {
        if (y == 1) ++c.pos;
        else if (y == 0) ++c.neg;
        else throw ValidationError("labels must be 0 or 1, got " + std::to_string(y));
    }
    return c;
}

// Indices sorted by score descending, index ascending within ties.
std::vector<std::size_t> descending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

} // namespace

double auroc(std::span<const double> scores, std::span<const std::int32_t> labels) {
    const auto counts = count_classes(scores, labels);
    if (counts.pos == 0 || counts.neg == 0) {
        throw ValidationError("auroc requires at least one positive and one negative label");
    }
    // Rank-sum form of the Mann-Whitney statistic; average ranks inside a
    // tie group give the half-credit convention exactly.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    const std::size_t n = order.size();
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(counts.pos);
    const double u = pos_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(counts.neg));
}

double average_precision(std::span<const double> scores, std::span<const std::int32_t> labels) {
    const auto counts = count_classes(scores, labels);
    if (counts.pos == 0) {
        throw ValidationError("average precision requires at least one positive label");
    }
    const auto order = descending_order(scores);
    const double total_pos = static_cast<double>(counts.pos);
    double ap = 0.0;
    double prev_recall = 0.0;
    std::int64_t cum_pos = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) cum_pos += labels[order[k]];
        const double recall = static_cast<double>(cum_pos) / total_pos;
        const double precision = static_cast<double>(cum_pos) / static_cast<double>(j);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

double recall_at_k(std::span<const double> scores, std::span<const std::int32_t> labels,
                   std::int64_t k) {
    const auto counts = count_classes(scores, labels);
    if (k < 1 || k > static_cast<std::int64_t>(scores.size())) {
        throw ValidationError("k out of range: " + std::to_string(k) + " for " +
                              std::to_string(scores.size()) + " scores");
    }
    if (counts.pos == 0) {
        throw ValidationError("recall_at_k requires at least one positive label");
    }
    const auto order = descending_order(scores);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < k; ++i) {
        hits += labels[order[static_cast<std::size_t>(i)]];
    }
    return static_cast<double>(hits) / static_cast<double>(counts.pos);
}

MetricReport evaluate(std::span<const double> scores, std::span<const std::int32_t> labels,
                      double fit_seconds, std::int64_t peak_memory_bytes) {
    const auto counts = count_classes(scores, labels);
    if (counts.pos == 0 || counts.neg == 0) {
        throw ValidationError("evaluate requires both classes in labels");
    }
    MetricReport report;
    report.num_pos = counts.pos;
    report.num_neg = counts.neg;
    report.k = counts.pos;
    report.auroc = auroc(scores, labels);
    report.auprc = average_precision(scores, labels);
    report.rec_at_k = recall_at_k(scores, labels, report.k);
    report.fit_seconds = fit_seconds;
    report.peak_memory_bytes = peak_memory_bytes;
    return report;
}

std::int64_t current_peak_memory_bytes() {
#if defined(__unix__) || defined(__APPLE__)
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
#if defined(__APPLE__)
    return static_cast<std::int64_t>(usage.ru_maxrss); // already bytes
#else
    return static_cast<std::int64_t>(usage.ru_maxrss) * 1024; // kilobytes
#endif
#else
    return 0;
#endif
}

} // namespace gad
