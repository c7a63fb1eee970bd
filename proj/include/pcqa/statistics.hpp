#pragma once

// Agreement statistics between predicted and observed scores. All reductions
// run left to right in a fixed order so results are reproducible bit for bit.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pcqa/error.hpp"

namespace pcqa {

struct ErrorSummary {
    double mean = 0.0;
    double std_dev = 0.0;
    double quantile_95 = 0.0;
};

namespace detail {

inline void require_paired(std::span<const double> predicted, std::span<const double> observed,
                           std::size_t min_size, const char* what) {
    if (predicted.size() != observed.size()) {
        throw NumericDomainError(std::string(what) + ": predicted and observed lengths differ (" +
                                 std::to_string(predicted.size()) + " vs " + std::to_string(observed.size()) + ")");
    }
    if (predicted.size() < min_size) {
        throw NumericDomainError(std::string(what) + " needs at least " + std::to_string(min_size) +
                                 " pairs, got " + std::to_string(predicted.size()));
    }
}

inline double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

}  // namespace detail

// Pearson linear correlation.
inline double plcc(std::span<const double> predicted, std::span<const double> observed) {
    detail::require_paired(predicted, observed, 2, "PLCC");
    const double mx = detail::mean_of(predicted);
    const double my = detail::mean_of(observed);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double dx = predicted[i] - mx;
        const double dy = observed[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw NumericDomainError("correlation is undefined for a constant vector");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> fractional_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

// Spearman rank-order correlation: Pearson over fractional ranks.
inline double srocc(std::span<const double> predicted, std::span<const double> observed) {
    detail::require_paired(predicted, observed, 2, "SROCC");
    const auto rp = fractional_ranks(predicted);
    const auto ro = fractional_ranks(observed);
    return plcc(rp, ro);
}

inline double rmse(std::span<const double> predicted, std::span<const double> observed) {
    detail::require_paired(predicted, observed, 1, "RMSE");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - observed[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(predicted.size()));
}

// Empirical quantile by linear interpolation between order statistics at the
// 0-based position p * (n - 1).
inline double quantile(std::span<const double> values, double p) {
    if (values.empty()) throw NumericDomainError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw NumericDomainError("quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Mean, sample standard deviation (n - 1 denominator) and 95% quantile of
// residuals. Residuals are observed minus predicted. A single residual has
// zero spread.
inline ErrorSummary error_summary(std::span<const double> residuals) {
    if (residuals.empty()) throw NumericDomainError("error summary of an empty residual list");
    ErrorSummary s;
    s.mean = detail::mean_of(residuals);
    if (residuals.size() > 1) {
        double ss = 0.0;
        for (double r : residuals) ss += (r - s.mean) * (r - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(residuals.size() - 1));
    }
    s.quantile_95 = quantile(residuals, 0.95);
    return s;
}

inline std::vector<double> residuals(std::span<const double> predicted, std::span<const double> observed) {
    detail::require_paired(predicted, observed, 1, "residuals");
    std::vector<double> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) out[i] = observed[i] - predicted[i];
    return out;
}

}  // namespace pcqa
