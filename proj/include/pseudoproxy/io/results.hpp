#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "pseudoproxy/harness.hpp"
#include "pseudoproxy/io/csv.hpp"

namespace pseudoproxy::io {

inline constexpr const char* results_header =
    "predictor_kind,level,holdout,rep,lasso_rmse,composite_rmse,ratio,lasso_converged,lasso_nonzero";

/// Rows come out in cell-index order, i.e. (kind, configured level order, holdout, rep).
inline void write_results_csv(std::ostream& out, const GridOutput& grid)
{
    out << results_header << '\n';
    for (const auto& r : grid.results) {
        out << to_string(r.cell.kind) << ',' << format_number(r.cell.level) << ',' << to_string(r.cell.holdout.kind)
            << ',' << r.replication_index << ',' << format_number(r.lasso_rmse) << ','
            << format_number(r.composite_rmse) << ',' << format_number(r.ratio) << ','
            << (r.lasso_converged ? "true" : "false") << ',' << r.lasso_nonzero << '\n';
    }
}

/// JSON number at the 10-significant-digit contract; non-finite values become strings.
inline nlohmann::ordered_json json_number(double v)
{
    if (!std::isfinite(v)) {
        return format_number(v);
    }
    return round_to_format(v);
}

inline nlohmann::ordered_json box_json(const std::optional<BoxStats>& box)
{
    if (!box) {
        return nullptr;
    }
    nlohmann::ordered_json j;
    j["median"] = json_number(box->median);
    j["q1"] = json_number(box->q1);
    j["q3"] = json_number(box->q3);
    j["whisker_low"] = json_number(box->whisker_low);
    j["whisker_high"] = json_number(box->whisker_high);
    auto outliers = nlohmann::ordered_json::array();
    for (const double v : box->outliers) {
        outliers.push_back(json_number(v));
    }
    j["outliers"] = std::move(outliers);
    return j;
}

inline nlohmann::ordered_json summary_json(const GridOutput& grid, std::uint64_t seed)
{
    nlohmann::ordered_json root;
    root["seed"] = seed;
    auto cells = nlohmann::ordered_json::array();
    for (const auto& s : grid.summaries) {
        nlohmann::ordered_json c;
        c["cell_index"] = s.cell.cell_index;
        c["predictor_kind"] = std::string(to_string(s.cell.kind));
        c["level"] = json_number(s.cell.level);
        c["holdout"] = std::string(to_string(s.cell.holdout.kind));
        c["n_reps"] = s.n_reps;
        c["n_lasso_converged"] = s.n_converged;
        c["lasso_rmse"] = box_json(s.lasso_rmse);
        c["composite_rmse"] = box_json(s.composite_rmse);
        c["ratio"] = box_json(s.ratio);
        cells.push_back(std::move(c));
    }
    root["cells"] = std::move(cells);
    return root;
}

inline void write_summary_json(std::ostream& out, const GridOutput& grid, std::uint64_t seed)
{
    out << summary_json(grid, seed).dump(2) << '\n';
}

}  // namespace pseudoproxy::io
