#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "pseudoproxy/matrix.hpp"

namespace pseudoproxy {

/// Row-wise mean across all predictor columns. Each row is summed in sorted
/// order, so the result is bit-identical under any column permutation.
inline Vector composite_mean(const Matrix& X)
{
    if (X.cols() < 1) {
        throw std::invalid_argument("composite_mean: no predictor columns");
    }
    Vector out(X.rows());
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = X(i, j);
        }
        std::sort(row.begin(), row.end());
        double sum = 0.0;
        for (const double v : row) {
            sum += v;
        }
        out(i) = sum / static_cast<double>(X.cols());
    }
    return out;
}

struct CompositeFit {
    double intercept = 0.0;
    double slope = 0.0;
    double train_r2 = 0.0;
    bool degenerate = false;  // constant composite: intercept-only fit
};

/// Simple least squares of y on a single regressor c.
inline CompositeFit ols_fit(const Vector& c, const Vector& y)
{
    if (c.size() != y.size()) {
        throw std::invalid_argument("ols_fit: composite length " + std::to_string(c.size()) +
                                    " does not match response length " + std::to_string(y.size()));
    }
    if (c.size() < 2) {
        throw std::invalid_argument("ols_fit: need at least 2 observations");
    }
    const double c_mean = c.mean();
    const double y_mean = y.mean();
    const Vector dc = c.array() - c_mean;
    const Vector dy = y.array() - y_mean;
    const double sxx = dc.squaredNorm();
    const double syy = dy.squaredNorm();

    CompositeFit fit;
    if (sxx <= 1e-26 * static_cast<double>(c.size()) * (1.0 + c_mean * c_mean)) {
        fit.intercept = y_mean;
        fit.degenerate = true;
        return fit;
    }
    const double sxy = dc.dot(dy);
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * c_mean;
    fit.train_r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

inline Vector predict_composite(const CompositeFit& fit, const Vector& c_new)
{
    return fit.slope * c_new.array() + fit.intercept;
}

}  // namespace pseudoproxy
