#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pseudoproxy/harness.hpp"
#include "pseudoproxy/io/config.hpp"
#include "pseudoproxy/io/csv.hpp"
#include "pseudoproxy/io/results.hpp"
#include "pseudoproxy/io/svg.hpp"
#include "pseudoproxy/lasso.hpp"

namespace pseudoproxy::cli {

/// Failure tagged with the stage that produced it (config, generate, write...).
class CommandError : public std::runtime_error {
public:
    CommandError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage))
    {
    }

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Files staged under temporary names and renamed into place together.
class StagedOutput {
public:
    explicit StagedOutput(std::filesystem::path dir) : dir_(std::move(dir)) {}

    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    ~StagedOutput()
    {
        std::error_code ec;
        for (const auto& [tmp, final_path] : files_) {
            std::filesystem::remove(tmp, ec);
        }
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body)
    {
        const auto final_path = dir_ / name;
        const auto tmp = dir_ / ("." + name + ".tmp");
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        body(out);
        out.close();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
        files_.emplace_back(tmp, final_path);
    }

    void commit()
    {
        for (const auto& [tmp, final_path] : files_) {
            std::filesystem::rename(tmp, final_path);
        }
        files_.clear();
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
};

inline std::string panel_file_name(HoldoutKind holdout, PredictorKind kind, io::Metric metric)
{
    return "boxplot_" + std::string(to_string(holdout)) + "_" + std::string(to_string(kind)) + "_" +
           std::string(io::to_string(metric)) + ".svg";
}

inline const char* metric_title(io::Metric m)
{
    switch (m) {
    case io::Metric::lasso_rmse: return "Lasso RMSE";
    case io::Metric::composite_rmse: return "Composite regression RMSE";
    case io::Metric::ratio: return "Lasso RMSE / composite RMSE";
    }
    return "";
}

/// Writes results.csv, summary.json and six boxplot panels per holdout scheme.
inline GridOutput cmd_run(const io::RunConfig& config, const std::filesystem::path& out_dir,
                          std::ostream& log = std::clog, const ProgressFn& progress = {})
{
    try {
        config.validate();
    }
    catch (const std::exception& e) {
        throw CommandError("config", e.what());
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw CommandError("output", "cannot create directory '" + out_dir.string() + "'");
    }

    GridOutput grid;
    try {
        grid = run_grid(config.to_grid(), progress);
    }
    catch (const std::exception& e) {
        throw CommandError("experiment", e.what());
    }

    try {
        StagedOutput staged(out_dir);
        staged.write("results.csv", [&](std::ostream& o) { io::write_results_csv(o, grid); });
        staged.write("summary.json", [&](std::ostream& o) { io::write_summary_json(o, grid, config.seed); });
        for (const HoldoutKind holdout : config.holdout) {
            for (const PredictorKind kind : {PredictorKind::pseudo_proxy, PredictorKind::ar1}) {
                std::vector<const CellSummary*> cells;
                for (const auto& s : grid.summaries) {
                    if (s.cell.kind == kind && s.cell.holdout.kind == holdout) {
                        cells.push_back(&s);
                    }
                }
                if (cells.empty()) {
                    continue;
                }
                for (const io::Metric m : {io::Metric::lasso_rmse, io::Metric::composite_rmse, io::Metric::ratio}) {
                    const std::string title = std::string(metric_title(m)) + " (" +
                                              (kind == PredictorKind::pseudo_proxy ? "pseudo-proxies" : "AR(1) series") +
                                              ", " + std::string(to_string(holdout)) + " holdout)";
                    const char* x_label = kind == PredictorKind::pseudo_proxy ? "SNR" : "AR(1) coefficient";
                    staged.write(panel_file_name(holdout, kind, m),
                                 [&](std::ostream& o) { io::write_boxplot_svg(o, cells, m, title, x_label); });
                }
            }
        }
        staged.commit();
    }
    catch (const std::exception& e) {
        throw CommandError("write", e.what());
    }

    log << "wrote " << grid.results.size() << " replications over " << grid.cells.size() << " cells to "
        << out_dir.string() << '\n';
    return grid;
}

inline TraceKind parse_trace_kind(const std::string& s)
{
    if (s == "randomwalk-lasso") {
        return TraceKind::randomwalk_lasso;
    }
    if (s == "whitenoise-composite") {
        return TraceKind::whitenoise_composite;
    }
    throw CommandError("usage", "unknown --kind '" + s + "' (expected randomwalk-lasso or whitenoise-composite)");
}

inline void write_trace_csv(std::ostream& out, const FitTrace& trace)
{
    out << "t,target,fitted,is_validation\n";
    for (const auto& row : trace.rows) {
        out << row.t << ',' << io::format_number(row.target) << ',' << io::format_number(row.fitted) << ','
            << (row.is_validation ? "true" : "false") << '\n';
    }
}

/**
 * Writes the trace CSV to `out_path`. For the Lasso kind a companion file
 * `<out_path>.meta` holds the line `nonzero_coefficients,<count>`.
 */
inline FitTrace cmd_example_fit(const std::string& kind, const io::RunConfig& config,
                                const std::filesystem::path& out_path, std::ostream& log = std::clog)
{
    const TraceKind trace_kind = parse_trace_kind(kind);
    try {
        config.validate();
    }
    catch (const std::exception& e) {
        throw CommandError("config", e.what());
    }
    const GridConfig grid = config.to_grid();
    const HoldoutScheme holdout = grid.holdouts.front();

    FitTrace trace;
    try {
        trace = example_fit_traces(trace_kind, config.seed, grid.params, holdout);
    }
    catch (const std::exception& e) {
        throw CommandError("fit", e.what());
    }

    try {
        auto dir = out_path.parent_path();
        if (dir.empty()) {
            dir = ".";
        }
        std::filesystem::create_directories(dir);
        StagedOutput staged(dir);
        const std::string name = out_path.filename().string();
        staged.write(name, [&](std::ostream& o) { write_trace_csv(o, trace); });
        if (trace.nonzero) {
            staged.write(name + ".meta", [&](std::ostream& o) { o << "nonzero_coefficients," << *trace.nonzero << '\n'; });
        }
        staged.commit();
    }
    catch (const std::exception& e) {
        throw CommandError("write", e.what());
    }

    log << "kind=" << kind << " seed=" << config.seed << " validation_rmse=" << io::format_number(trace.validation_rmse);
    if (trace.nonzero) {
        log << " nonzero_coefficients=" << *trace.nonzero;
    }
    log << '\n';
    return trace;
}

struct SolveReport {
    LassoFit fit;
    double kkt = 0.0;
};

/// Reads the design and response, fits the Lasso and prints the report to `out`.
inline SolveReport cmd_solve(const std::string& matrix_path, const std::string& response_path,
                             const LassoParams& params, std::ostream& out)
{
    Matrix x;
    Matrix y;
    try {
        x = io::read_matrix_csv(matrix_path);
        y = io::read_matrix_csv(response_path);
    }
    catch (const std::exception& e) {
        throw CommandError("parse", e.what());
    }
    if (y.cols() != 1) {
        throw CommandError("input", "response file must have exactly one column, found " + std::to_string(y.cols()));
    }
    if (y.rows() != x.rows()) {
        throw CommandError("input", "design has " + std::to_string(x.rows()) + " rows but response has " +
                                        std::to_string(y.rows()));
    }

    SolveReport report;
    try {
        params.validate();
        const Vector response = y.col(0);
        const StandardizedDesign design = standardize(x, response, params.standardize, params.fit_intercept);
        report.fit = fit_lasso_at(design, params.lambda_fraction * lambda_max(design), params);
        report.kkt = kkt_check(report.fit, design);
    }
    catch (const std::exception& e) {
        throw CommandError("solve", e.what());
    }

    const LassoFit& fit = report.fit;
    out << "lambda_max " << io::format_number(fit.lambda_max) << '\n';
    out << "lambda " << io::format_number(fit.lambda) << '\n';
    out << "intercept " << io::format_number(fit.intercept) << '\n';
    out << "converged " << (fit.converged ? "true" : "false") << '\n';
    out << "sweeps " << fit.n_sweeps_total << '\n';
    out << "kkt_max_violation " << io::format_number(report.kkt) << '\n';
    out << "nonzero " << fit.n_nonzero << '\n';
    for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
        if (fit.coefficients(j) != 0.0) {
            out << "coef " << (j + 1) << ' ' << io::format_number(fit.coefficients(j)) << '\n';
        }
    }
    return report;
}

}  // namespace pseudoproxy::cli
