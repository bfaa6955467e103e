#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pseudoproxy/baseline.hpp"
#include "pseudoproxy/lasso.hpp"
#include "pseudoproxy/matrix.hpp"
#include "pseudoproxy/random.hpp"
#include "pseudoproxy/stats.hpp"
#include "pseudoproxy/surrogate.hpp"

namespace pseudoproxy {

enum class HoldoutKind { end, interior };
enum class PredictorKind { pseudo_proxy, ar1 };

inline std::string_view to_string(HoldoutKind k) noexcept
{
    return k == HoldoutKind::end ? "end" : "interior";
}

inline std::string_view to_string(PredictorKind k) noexcept
{
    return k == PredictorKind::pseudo_proxy ? "pseudo_proxy" : "ar1";
}

inline HoldoutKind parse_holdout(std::string_view s)
{
    if (s == "end") {
        return HoldoutKind::end;
    }
    if (s == "interior") {
        return HoldoutKind::interior;
    }
    throw std::invalid_argument("unknown holdout scheme '" + std::string(s) + "' (expected end or interior)");
}

/// Train/test split of a series. Indices exposed by the accessors are 0-based;
/// `interior_start` is 1-based, matching the time axis t = 1..series_length.
struct HoldoutScheme {
    HoldoutKind kind = HoldoutKind::end;
    std::size_t n_train = 119;
    std::size_t n_test = 30;
    std::size_t series_length = 149;
    std::size_t interior_start = 60;

    static HoldoutScheme end_block(std::size_t length = 149, std::size_t test = 30)
    {
        return {HoldoutKind::end, length - test, test, length, 60};
    }

    static HoldoutScheme interior_block(std::size_t length = 149, std::size_t test = 30, std::size_t start = 60)
    {
        return {HoldoutKind::interior, length - test, test, length, start};
    }

    void validate() const
    {
        if (n_test < 1 || n_train < 2) {
            throw std::invalid_argument("HoldoutScheme: need at least 2 training and 1 test observation");
        }
        if (n_train + n_test != series_length) {
            throw std::invalid_argument("HoldoutScheme: n_train + n_test must equal series_length");
        }
        if (kind == HoldoutKind::interior && (interior_start < 1 || interior_start + n_test - 1 > series_length)) {
            throw std::invalid_argument("HoldoutScheme: interior block falls outside the series");
        }
    }

    std::size_t first_test() const noexcept
    {
        return kind == HoldoutKind::end ? n_train : interior_start - 1;
    }

    bool is_test(std::size_t i) const noexcept
    {
        return i >= first_test() && i < first_test() + n_test;
    }

    std::vector<std::size_t> train_indices() const
    {
        validate();
        std::vector<std::size_t> out;
        out.reserve(n_train);
        for (std::size_t i = 0; i < series_length; ++i) {
            if (!is_test(i)) {
                out.push_back(i);
            }
        }
        return out;
    }

    std::vector<std::size_t> test_indices() const
    {
        validate();
        std::vector<std::size_t> out(n_test);
        std::iota(out.begin(), out.end(), first_test());
        return out;
    }
};

struct CellSpec {
    PredictorKind kind = PredictorKind::pseudo_proxy;
    double level = 1.0;  // SNR for pseudo-proxies, alpha for AR(1) ensembles
    HoldoutScheme holdout;
    std::uint32_t cell_index = 0;
};

/// Everything about one replication that is not the cell or the seed.
struct ExperimentParams {
    TargetSpec target;
    std::size_t n_predictors = 1138;
    double predictor_innovation_sd = 1.0;
    LassoParams lasso;
};

struct ReplicationResult {
    CellSpec cell;
    std::uint32_t replication_index = 0;
    double lasso_rmse = 0.0;
    double composite_rmse = 0.0;
    double ratio = 0.0;  // NaN when composite_rmse == 0
    bool lasso_converged = false;
    std::size_t lasso_nonzero = 0;
    double lasso_kkt_violation = 0.0;
};

/// Out-of-sample predictions of both models for one generated data set.
struct ReplicationFits {
    TargetSeries target;
    LassoFit lasso;
    CompositeFit composite;
    Vector lasso_fitted;      // all time steps
    Vector composite_fitted;  // all time steps
};

inline PredictorMatrix generate_predictors(PredictorKind kind, double level, const TargetSeries& target,
                                           const ExperimentParams& params, std::uint64_t seed, std::uint32_t cell,
                                           std::uint32_t rep)
{
    if (kind == PredictorKind::pseudo_proxy) {
        const NormalStream noise = derive_stream(make_key(seed, cell, rep, Purpose::proxy_noise));
        return gen_pseudo_proxies(target, {params.n_predictors, level}, noise);
    }
    const NormalStream stream = derive_stream(make_key(seed, cell, rep, Purpose::ar1_ensemble));
    return gen_ar1_ensemble({params.n_predictors, params.target.length, level, params.predictor_innovation_sd}, stream);
}

inline ReplicationFits fit_replication(PredictorKind kind, double level, const HoldoutScheme& holdout,
                                       const ExperimentParams& params, std::uint64_t seed, std::uint32_t cell,
                                       std::uint32_t rep)
{
    if (holdout.series_length != params.target.length) {
        throw std::invalid_argument("holdout series_length " + std::to_string(holdout.series_length) +
                                    " does not match target length " + std::to_string(params.target.length));
    }
    ReplicationFits out;
    NormalStream target_stream = derive_stream(make_key(seed, cell, rep, Purpose::target));
    out.target = gen_target(params.target, target_stream);
    const PredictorMatrix predictors = generate_predictors(kind, level, out.target, params, seed, cell, rep);

    const auto train = holdout.train_indices();
    const Matrix x_train = predictors.rows(train).data();
    const Vector y_train = select_rows(out.target.values, train);

    out.lasso = fit_lasso(x_train, y_train, params.lasso);
    out.lasso_fitted = predict(out.lasso, predictors.data());

    const Vector composite = composite_mean(predictors.data());
    out.composite = ols_fit(select_rows(composite, train), y_train);
    out.composite_fitted = predict_composite(out.composite, composite);
    return out;
}

inline ReplicationResult run_replication(const CellSpec& cell, std::uint32_t rep, std::uint64_t seed,
                                         const ExperimentParams& params)
{
    const ReplicationFits fits = fit_replication(cell.kind, cell.level, cell.holdout, params, seed,
                                                 cell.cell_index, rep);
    const auto test = cell.holdout.test_indices();
    const Vector actual = select_rows(fits.target.values, test);

    ReplicationResult r;
    r.cell = cell;
    r.replication_index = rep;
    r.lasso_rmse = rmse(select_rows(fits.lasso_fitted, test), actual);
    r.composite_rmse = rmse(select_rows(fits.composite_fitted, test), actual);
    r.ratio = r.composite_rmse > 0.0 ? r.lasso_rmse / r.composite_rmse : std::numeric_limits<double>::quiet_NaN();
    r.lasso_converged = fits.lasso.converged;
    r.lasso_nonzero = fits.lasso.n_nonzero;
    r.lasso_kkt_violation = fits.lasso.kkt_max_violation;
    return r;
}

struct GridConfig {
    std::uint64_t seed = 0;
    std::size_t replications = 1000;
    std::vector<double> snr_levels{4.0, 2.0, 1.0, 0.5, 0.25, 0.125};
    std::vector<double> ar_levels{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<HoldoutScheme> holdouts{HoldoutScheme::end_block()};
    ExperimentParams params;
    std::size_t workers = 0;  // 0: hardware concurrency
};

/// Cells in frozen order: pseudo-proxy levels, then AR(1) levels, each level
/// expanded over the configured holdout schemes. The position is the cell index.
inline std::vector<CellSpec> enumerate_cells(const GridConfig& config)
{
    std::vector<CellSpec> cells;
    std::uint32_t index = 0;
    auto add = [&](PredictorKind kind, const std::vector<double>& levels) {
        for (const double level : levels) {
            for (const HoldoutScheme& h : config.holdouts) {
                cells.push_back({kind, level, h, index++});
            }
        }
    };
    add(PredictorKind::pseudo_proxy, config.snr_levels);
    add(PredictorKind::ar1, config.ar_levels);
    return cells;
}

struct CellSummary {
    CellSpec cell;
    std::size_t n_reps = 0;
    std::size_t n_converged = 0;
    std::optional<BoxStats> lasso_rmse;      // empty when n_reps is below the boxplot minimum
    std::optional<BoxStats> composite_rmse;
    std::optional<BoxStats> ratio;
};

inline constexpr std::size_t min_summary_reps = 5;

inline CellSummary summarize_cell(const CellSpec& cell, std::span<const ReplicationResult> results,
                                  std::size_t min_reps = min_summary_reps)
{
    if (results.size() < min_reps) {
        throw std::invalid_argument("summarize_cell: " + std::to_string(results.size()) +
                                    " replications, need at least " + std::to_string(min_reps));
    }
    CellSummary s;
    s.cell = cell;
    s.n_reps = results.size();
    if (results.empty()) {
        return s;
    }
    std::vector<double> lasso, composite, ratio;
    for (const auto& r : results) {
        lasso.push_back(r.lasso_rmse);
        composite.push_back(r.composite_rmse);
        if (std::isfinite(r.ratio)) {
            ratio.push_back(r.ratio);
        }
        s.n_converged += r.lasso_converged ? 1 : 0;
    }
    s.lasso_rmse = box_stats(std::move(lasso));
    s.composite_rmse = box_stats(std::move(composite));
    if (!ratio.empty()) {
        s.ratio = box_stats(std::move(ratio));
    }
    return s;
}

struct GridOutput {
    std::vector<CellSpec> cells;
    std::vector<ReplicationResult> results;  // sorted by (cell_index, replication_index)
    std::vector<CellSummary> summaries;      // one per cell, in cell order
};

class GridError : public std::runtime_error {
public:
    struct Failure {
        std::uint32_t cell_index;
        std::uint32_t replication_index;
        std::string message;
    };

    explicit GridError(std::vector<Failure> failures)
        : std::runtime_error(describe(failures)), failures_(std::move(failures))
    {
    }

    const std::vector<Failure>& failures() const noexcept { return failures_; }

private:
    static std::string describe(const std::vector<Failure>& failures)
    {
        std::string msg = std::to_string(failures.size()) + " replication(s) failed:";
        for (const auto& f : failures) {
            msg += "\n  cell " + std::to_string(f.cell_index) + " rep " + std::to_string(f.replication_index) +
                   ": " + f.message;
        }
        return msg;
    }

    std::vector<Failure> failures_;
};

inline std::size_t resolve_workers(std::size_t requested)
{
    if (requested > 0) {
        return requested;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Completed-units callback; may be invoked from any worker thread.
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/**
 * Runs every (cell, replication) unit on a pool of workers. Each unit derives
 * its own substreams from (seed, cell_index, rep) and writes into a fixed
 * slot, so output does not depend on the worker count or scheduling.
 */
inline GridOutput run_grid(const GridConfig& config, const ProgressFn& progress = {})
{
    config.params.lasso.validate();
    config.params.target.validate();
    for (const auto& h : config.holdouts) {
        h.validate();
    }
    if (config.replications < 1) {
        throw std::invalid_argument("run_grid: replications must be positive");
    }

    GridOutput out;
    out.cells = enumerate_cells(config);
    const std::size_t reps = config.replications;
    const std::size_t total = out.cells.size() * reps;
    out.results.resize(total);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex failure_mutex;
    std::vector<GridError::Failure> failures;

    auto worker = [&] {
        for (std::size_t unit = next.fetch_add(1); unit < total; unit = next.fetch_add(1)) {
            const CellSpec& cell = out.cells[unit / reps];
            const auto rep = static_cast<std::uint32_t>(unit % reps);
            try {
                out.results[unit] = run_replication(cell, rep, config.seed, config.params);
            }
            catch (const std::exception& e) {
                const std::lock_guard lock(failure_mutex);
                failures.push_back({cell.cell_index, rep, e.what()});
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (progress) {
                progress(finished, total);
            }
        }
    };

    const std::size_t n_workers = std::min(resolve_workers(config.workers), std::max<std::size_t>(total, 1));
    if (n_workers == 1) {
        worker();
    }
    else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) {
            return a.cell_index != b.cell_index ? a.cell_index < b.cell_index
                                                : a.replication_index < b.replication_index;
        });
        throw GridError(std::move(failures));
    }

    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        const std::span<const ReplicationResult> cell_results(out.results.data() + c * reps, reps);
        if (reps >= min_summary_reps) {
            out.summaries.push_back(summarize_cell(out.cells[c], cell_results));
        }
        else {
            // too few replications for a boxplot: keep the count, leave the statistics empty
            out.summaries.push_back(summarize_cell(out.cells[c], cell_results, 0));
            out.summaries.back().lasso_rmse.reset();
            out.summaries.back().composite_rmse.reset();
            out.summaries.back().ratio.reset();
        }
    }
    return out;
}

enum class TraceKind { randomwalk_lasso, whitenoise_composite };

struct TraceRow {
    std::size_t t = 0;  // 1-based time index
    double target = 0.0;
    double fitted = 0.0;
    bool is_validation = false;
};

struct FitTrace {
    TraceKind kind = TraceKind::randomwalk_lasso;
    std::vector<TraceRow> rows;
    std::optional<std::size_t> nonzero;  // Lasso kind only
    double validation_rmse = 0.0;
};

/// One replication of either Lasso on random walks (alpha = 1) or composite
/// regression on white noise (alpha = 0), traced over every time step.
inline FitTrace example_fit_traces(TraceKind kind, std::uint64_t seed, const ExperimentParams& params,
                                   const HoldoutScheme& holdout = HoldoutScheme::end_block())
{
    const bool lasso = kind == TraceKind::randomwalk_lasso;
    const double alpha = lasso ? 1.0 : 0.0;
    const ReplicationFits fits = fit_replication(PredictorKind::ar1, alpha, holdout, params, seed,
                                                 lasso ? 0u : 1u, 0u);
    const Vector& fitted = lasso ? fits.lasso_fitted : fits.composite_fitted;

    FitTrace trace;
    trace.kind = kind;
    for (Eigen::Index i = 0; i < fits.target.values.size(); ++i) {
        const auto t = static_cast<std::size_t>(i);
        trace.rows.push_back({t + 1, fits.target.values(i), fitted(i), holdout.is_test(t)});
    }
    if (lasso) {
        trace.nonzero = fits.lasso.n_nonzero;
    }
    const auto test = holdout.test_indices();
    trace.validation_rmse = rmse(select_rows(fitted, test), select_rows(fits.target.values, test));
    return trace;
}

}  // namespace pseudoproxy
