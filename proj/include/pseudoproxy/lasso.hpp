#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pseudoproxy/matrix.hpp"

namespace pseudoproxy {

inline double soft_threshold(double z, double gamma) noexcept
{
    if (z > gamma) {
        return z - gamma;
    }
    if (z < -gamma) {
        return z + gamma;
    }
    return 0.0;
}

struct LassoParams {
    double lambda_fraction = 0.05;  // target penalty as a fraction of lambda_max
    std::size_t path_points = 20;
    double tol = 1e-7;              // max standardized-coefficient change per full sweep
    std::size_t max_sweeps = 100000;
    bool standardize = true;
    bool fit_intercept = true;
    // Periodically replace coordinate sweeps on a settled active set with an
    // exact solve of the sign-fixed stationarity equations.
    bool exact_active_solve = true;

    void validate() const
    {
        if (!(lambda_fraction > 0.0 && lambda_fraction <= 1.0)) {
            throw std::invalid_argument("LassoParams: lambda_fraction must lie in (0, 1]");
        }
        if (path_points < 1) {
            throw std::invalid_argument("LassoParams: path_points must be at least 1");
        }
        if (!(tol > 0.0)) {
            throw std::invalid_argument("LassoParams: tol must be positive");
        }
        if (max_sweeps < 1) {
            throw std::invalid_argument("LassoParams: max_sweeps must be at least 1");
        }
    }
};

/**
 * Centered (and, by default, unit-variance) copy of a training design.
 *
 * Column j of `x` is (X_j - column_means[j]) / column_sds[j] where column_sds
 * uses the 1/n convention. Columns with zero spread are flagged in
 * `is_constant`, zeroed in `x`, and never enter the fit. `curvature[j]` is
 * ||x_j||^2 / n, which is 1 for every retained standardized column.
 */
struct StandardizedDesign {
    Vector column_means;
    Vector column_sds;
    double y_mean = 0.0;
    Matrix x;
    Vector y;  // centered response
    Vector curvature;
    std::vector<char> is_constant;
    bool standardized = true;

    Eigen::Index n() const noexcept { return x.rows(); }
    Eigen::Index p() const noexcept { return x.cols(); }
    std::size_t n_retained() const noexcept
    {
        return static_cast<std::size_t>(std::count(is_constant.begin(), is_constant.end(), char{0}));
    }
};

inline StandardizedDesign standardize(const Matrix& X, const Vector& y, bool scale = true, bool center = true)
{
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n < 2) {
        throw std::invalid_argument("standardize: need at least 2 rows");
    }
    if (y.size() != n) {
        throw std::invalid_argument("standardize: response length " + std::to_string(y.size()) +
                                    " does not match " + std::to_string(n) + " design rows");
    }
    if (p < 1) {
        throw std::invalid_argument("standardize: design has no columns");
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw std::invalid_argument("standardize: non-finite input");
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    StandardizedDesign d;
    d.standardized = scale;
    d.column_means = center ? Vector(X.colwise().mean().transpose()) : Vector::Zero(p);
    d.column_sds = Vector::Ones(p);
    d.curvature = Vector::Zero(p);
    d.is_constant.assign(static_cast<std::size_t>(p), 0);
    d.x.resize(n, p);

    for (Eigen::Index j = 0; j < p; ++j) {
        auto col = d.x.col(j);
        col = X.col(j).array() - d.column_means(j);
        const double spread = std::sqrt(col.squaredNorm() * inv_n);
        const double magnitude = X.col(j).cwiseAbs().maxCoeff();
        if (spread <= 1e-13 * magnitude || spread == 0.0) {
            d.is_constant[static_cast<std::size_t>(j)] = 1;
            d.column_sds(j) = 0.0;
            col.setZero();
            continue;
        }
        if (scale) {
            d.column_sds(j) = spread;
            col /= spread;
        }
        d.curvature(j) = col.squaredNorm() * inv_n;
    }
    if (d.n_retained() == 0) {
        throw std::invalid_argument("standardize: every column is constant");
    }

    d.y_mean = center ? y.mean() : 0.0;
    d.y = y.array() - d.y_mean;
    return d;
}

/// Smallest penalty at which the all-zero coefficient vector is optimal.
inline double lambda_max(const StandardizedDesign& d)
{
    const Vector g = d.x.transpose() * d.y / static_cast<double>(d.n());
    double best = 0.0;
    for (Eigen::Index j = 0; j < d.p(); ++j) {
        if (!d.is_constant[static_cast<std::size_t>(j)]) {
            best = std::max(best, std::abs(g(j)));
        }
    }
    return best;
}

struct LassoFit {
    double intercept = 0.0;
    Vector coefficients;  // original scale
    double lambda = 0.0;  // effective penalty, standardized scale
    double lambda_max = 0.0;
    std::size_t n_sweeps_total = 0;
    bool converged = false;
    double kkt_max_violation = 0.0;
    std::size_t n_nonzero = 0;
};

/// Penalized objective (1/2n)||r||^2 + lambda * ||beta||_1 on the standardized scale.
inline double lasso_objective(const StandardizedDesign& d, const Vector& beta_std, double lambda)
{
    const Vector r = d.y - d.x * beta_std;
    return 0.5 * r.squaredNorm() / static_cast<double>(d.n()) + lambda * beta_std.lpNorm<1>();
}

/// Max KKT violation of standardized coefficients `beta_std` at penalty `lambda`.
inline double kkt_violation(const StandardizedDesign& d, const Vector& beta_std, double lambda)
{
    const Vector r = d.y - d.x * beta_std;
    const Vector g = d.x.transpose() * r / static_cast<double>(d.n());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < d.p(); ++j) {
        if (d.is_constant[static_cast<std::size_t>(j)]) {
            continue;
        }
        const double b = beta_std(j);
        const double v = b == 0.0 ? std::max(std::abs(g(j)) - lambda, 0.0)
                                  : std::abs(g(j) - lambda * (b > 0.0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

inline Vector standardized_coefficients(const LassoFit& fit, const StandardizedDesign& d)
{
    if (fit.coefficients.size() != d.p()) {
        throw std::invalid_argument("standardized_coefficients: fit and design disagree on p");
    }
    Vector beta = Vector::Zero(d.p());
    for (Eigen::Index j = 0; j < d.p(); ++j) {
        if (!d.is_constant[static_cast<std::size_t>(j)]) {
            beta(j) = fit.coefficients(j) * d.column_sds(j);
        }
    }
    return beta;
}

inline double kkt_check(const LassoFit& fit, const StandardizedDesign& d)
{
    return kkt_violation(d, standardized_coefficients(fit, d), fit.lambda);
}

enum class StartMode {
    warm_path,  // geometric lambda path from lambda_max down to the target
    cold,       // single solve at the target from beta = 0
};

/// Called after every coordinate sweep with the current standardized coefficients.
struct NoSweepObserver {
    void operator()(const Vector&, double /*lambda*/) const noexcept {}
};

namespace detail {

struct SweepState {
    Vector beta;
    Vector residual;
    std::vector<Eigen::Index> active;
    std::vector<char> in_active;
};

/// One cyclic pass over `indices`; returns the largest |coefficient change|.
template <class Indices>
double sweep(const StandardizedDesign& d, double lambda, SweepState& s, const Indices& indices)
{
    const double inv_n = 1.0 / static_cast<double>(d.n());
    double max_change = 0.0;
    for (const Eigen::Index j : indices) {
        const double old = s.beta(j);
        const double curv = d.curvature(j);
        const double z = d.x.col(j).dot(s.residual) * inv_n + curv * old;
        const double updated = soft_threshold(z, lambda) / curv;
        const double delta = updated - old;
        if (delta != 0.0) {
            s.residual.noalias() -= delta * d.x.col(j);
            s.beta(j) = updated;
            max_change = std::max(max_change, std::abs(delta));
            if (updated != 0.0 && !s.in_active[static_cast<std::size_t>(j)]) {
                s.in_active[static_cast<std::size_t>(j)] = 1;
                s.active.push_back(j);
            }
        }
    }
    return max_change;
}

/**
 * With the signs of the nonzero coefficients held fixed, the Lasso objective
 * is a smooth convex quadratic on that face; its minimizer solves
 *   (X_S' X_S / n) b_S = X_S' y / n - lambda * sign(b_S).
 * The coefficients move toward that minimizer, stopping at the first sign
 * boundary (the crossing coefficient is set to exactly zero). The step is
 * rejected unless the objective does not increase. Returns whether it was taken.
 */
inline bool exact_active_step(const StandardizedDesign& d, double lambda, SweepState& s)
{
    std::vector<Eigen::Index> support;
    for (const Eigen::Index j : s.active) {
        if (s.beta(j) != 0.0) {
            support.push_back(j);
        }
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    if (k == 0 || k >= d.n()) {
        return false;
    }
    Matrix xs(d.n(), k);
    Vector old(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        xs.col(i) = d.x.col(support[static_cast<std::size_t>(i)]);
        old(i) = s.beta(support[static_cast<std::size_t>(i)]);
    }
    const double inv_n = 1.0 / static_cast<double>(d.n());
    const Matrix gram = xs.transpose() * xs * inv_n;
    Vector rhs = xs.transpose() * d.y * inv_n;
    for (Eigen::Index i = 0; i < k; ++i) {
        rhs(i) -= lambda * (old(i) > 0.0 ? 1.0 : -1.0);
    }
    const Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
        return false;
    }
    const Vector target = llt.solve(rhs);
    if (!target.allFinite()) {
        return false;
    }

    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
        if ((target(i) > 0.0) != (old(i) > 0.0) || target(i) == 0.0) {
            const double t = old(i) / (old(i) - target(i));
            if (t < step) {
                step = t;
                blocking = i;
            }
        }
    }
    Vector moved = old + step * (target - old);
    if (blocking >= 0) {
        moved(blocking) = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            // rounding must not push any other coefficient across zero
            if (moved(i) != 0.0 && (moved(i) > 0.0) != (old(i) > 0.0)) {
                moved(i) = 0.0;
            }
        }
    }
    Vector residual = d.y - xs * moved;
    auto objective = [&](const Vector& r, const Vector& b) {
        return 0.5 * r.squaredNorm() * inv_n + lambda * b.lpNorm<1>();
    };
    // Only the support moves, so comparing on it compares the full objective.
    if (!(objective(residual, moved) <= objective(s.residual, old))) {
        return false;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        s.beta(support[static_cast<std::size_t>(i)]) = moved(i);
    }
    s.residual = std::move(residual);
    return true;
}

/**
 * Coordinate descent at a single lambda. Alternates a full sweep over every
 * retained column with inner sweeps over the ever-active set until the inner
 * loop settles; stops when a full sweep moves no coefficient by tol or more.
 */
template <class Observer>
bool solve_at(const StandardizedDesign& d, double lambda, SweepState& s, const std::vector<Eigen::Index>& all,
              const LassoParams& params, std::size_t& sweeps, Observer& observer)
{
    constexpr std::size_t exact_step_interval = 8;
    while (sweeps < params.max_sweeps) {
        const double full_change = sweep(d, lambda, s, all);
        ++sweeps;
        observer(s.beta, lambda);
        if (full_change < params.tol) {
            return true;
        }
        std::size_t since_attempt = 0;
        while (sweeps < params.max_sweeps) {
            const double change = sweep(d, lambda, s, s.active);
            ++sweeps;
            observer(s.beta, lambda);
            if (change < params.tol) {
                break;
            }
            if (params.exact_active_solve && ++since_attempt >= exact_step_interval) {
                since_attempt = 0;
                if (exact_active_step(d, lambda, s)) {
                    observer(s.beta, lambda);
                }
            }
        }
    }
    return false;
}

}  // namespace detail

/**
 * Solves min (1/2n)||y_c - X_s b||^2 + lambda ||b||_1 over standardized
 * coefficients b by cyclic coordinate descent, then maps b back to the
 * original scale. With StartMode::warm_path the solve walks
 * `params.path_points` geometrically spaced penalties from lambda_max down to
 * `lambda`, warm-starting each from the previous solution; the sweep budget
 * `params.max_sweeps` is shared across the whole path.
 */
template <class Observer = NoSweepObserver>
LassoFit fit_lasso_at(const StandardizedDesign& d, double lambda, const LassoParams& params,
                      StartMode start = StartMode::warm_path, Observer observer = {})
{
    params.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("fit_lasso: lambda must be finite and non-negative");
    }

    LassoFit fit;
    fit.lambda = lambda;
    fit.lambda_max = lambda_max(d);

    detail::SweepState s;
    s.beta = Vector::Zero(d.p());
    s.residual = d.y;
    s.in_active.assign(static_cast<std::size_t>(d.p()), 0);

    std::vector<Eigen::Index> all;
    all.reserve(static_cast<std::size_t>(d.p()));
    for (Eigen::Index j = 0; j < d.p(); ++j) {
        if (!d.is_constant[static_cast<std::size_t>(j)]) {
            all.push_back(j);
        }
    }

    bool converged = true;
    if (lambda < fit.lambda_max) {
        std::vector<double> path;
        if (start == StartMode::warm_path && params.path_points > 1 && lambda > 0.0) {
            const double ratio = lambda / fit.lambda_max;
            const auto m = params.path_points - 1;
            for (std::size_t k = 1; k < m; ++k) {
                path.push_back(fit.lambda_max * std::pow(ratio, static_cast<double>(k) / static_cast<double>(m)));
            }
        }
        else if (start == StartMode::warm_path && params.path_points > 1) {
            // lambda == 0 has no geometric path; step linearly instead
            const auto m = params.path_points - 1;
            for (std::size_t k = 1; k < m; ++k) {
                path.push_back(fit.lambda_max * (1.0 - static_cast<double>(k) / static_cast<double>(m)));
            }
        }
        path.push_back(lambda);

        for (const double step : path) {
            // Refresh the residual so rounding drift does not accumulate along the path.
            s.residual = d.y - d.x * s.beta;
            if (!detail::solve_at(d, step, s, all, params, fit.n_sweeps_total, observer)) {
                converged = false;
                break;
            }
        }
    }

    fit.converged = converged;
    fit.kkt_max_violation = kkt_violation(d, s.beta, lambda);

    fit.coefficients = Vector::Zero(d.p());
    for (const Eigen::Index j : all) {
        fit.coefficients(j) = d.standardized ? s.beta(j) / d.column_sds(j) : s.beta(j);
    }
    fit.n_nonzero = static_cast<std::size_t>((fit.coefficients.array() != 0.0).count());
    fit.intercept = d.y_mean - d.column_means.dot(fit.coefficients);
    return fit;
}

/// Lasso at lambda = params.lambda_fraction * lambda_max on a raw training design.
template <class Observer = NoSweepObserver>
LassoFit fit_lasso(const Matrix& X, const Vector& y, const LassoParams& params, Observer observer = {})
{
    params.validate();
    const StandardizedDesign d = standardize(X, y, params.standardize, params.fit_intercept);
    return fit_lasso_at(d, params.lambda_fraction * lambda_max(d), params, StartMode::warm_path, std::move(observer));
}

inline Vector predict(const LassoFit& fit, const Matrix& X_new)
{
    if (X_new.cols() != fit.coefficients.size()) {
        throw std::invalid_argument("predict: design has " + std::to_string(X_new.cols()) + " columns, fit has " +
                                    std::to_string(fit.coefficients.size()));
    }
    return (X_new * fit.coefficients).array() + fit.intercept;
}

}  // namespace pseudoproxy
