#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pseudoproxy/matrix.hpp"

namespace pseudoproxy {

inline double rmse(const Vector& predicted, const Vector& actual)
{
    if (predicted.size() != actual.size()) {
        throw std::invalid_argument("rmse: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                                    std::to_string(actual.size()) + ")");
    }
    if (predicted.size() == 0) {
        throw std::invalid_argument("rmse: empty input");
    }
    return std::sqrt((predicted - actual).squaredNorm() / static_cast<double>(predicted.size()));
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and non-empty.
inline double quantile_sorted(std::span<const double> sorted, double prob)
{
    if (sorted.empty()) {
        throw std::invalid_argument("quantile_sorted: empty input");
    }
    const double h = static_cast<double>(sorted.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double median(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

/// Tukey boxplot: whiskers reach the most extreme points within 1.5 IQR of the quartiles.
struct BoxStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;  // ascending
};

inline BoxStats box_stats(std::vector<double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("box_stats: empty input");
    }
    std::sort(values.begin(), values.end());
    BoxStats b;
    b.q1 = quantile_sorted(values, 0.25);
    b.median = quantile_sorted(values, 0.5);
    b.q3 = quantile_sorted(values, 0.75);
    const double fence = 1.5 * (b.q3 - b.q1);
    const double low_fence = b.q1 - fence;
    const double high_fence = b.q3 + fence;

    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (const double v : values) {
        if (v < low_fence || v > high_fence) {
            b.outliers.push_back(v);
            continue;
        }
        b.whisker_low = std::min(b.whisker_low, v);
        b.whisker_high = std::max(b.whisker_high, v);
    }
    return b;
}

}  // namespace pseudoproxy
