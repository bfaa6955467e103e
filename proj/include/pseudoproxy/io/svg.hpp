#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "pseudoproxy/harness.hpp"
#include "pseudoproxy/io/csv.hpp"

namespace pseudoproxy::io {

enum class Metric { lasso_rmse, composite_rmse, ratio };

inline std::string_view to_string(Metric m) noexcept
{
    switch (m) {
    case Metric::lasso_rmse: return "lasso_rmse";
    case Metric::composite_rmse: return "composite_rmse";
    case Metric::ratio: return "ratio";
    }
    return "";
}

inline const std::optional<BoxStats>& metric_box(const CellSummary& s, Metric m)
{
    switch (m) {
    case Metric::lasso_rmse: return s.lasso_rmse;
    case Metric::composite_rmse: return s.composite_rmse;
    default: return s.ratio;
    }
}

inline std::string xml_escape(std::string_view text)
{
    std::string out;
    for (const char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

namespace detail {

inline std::string coord(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

/// Roughly five round tick values spanning [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi)
{
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (raw <= step) {
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

}  // namespace detail

/**
 * One Tukey boxplot panel: a box glyph (<g class="box">) per cell, in the
 * order given. Cells without statistics get an empty glyph so the count of
 * glyphs always equals the number of levels.
 */
inline void write_boxplot_svg(std::ostream& out, const std::vector<const CellSummary*>& cells, Metric metric,
                              const std::string& title, const std::string& x_label)
{
    constexpr double width = 480.0;
    constexpr double height = 320.0;
    constexpr double left = 64.0;
    constexpr double right = 16.0;
    constexpr double top = 36.0;
    constexpr double bottom = 52.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto* c : cells) {
        if (const auto& box = metric_box(*c, metric)) {
            lo = std::min({lo, box->whisker_low, box->outliers.empty() ? lo : box->outliers.front()});
            hi = std::max({hi, box->whisker_high, box->outliers.empty() ? hi : box->outliers.back()});
        }
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo <= 0.0) {
        const double pad = std::max(std::abs(hi) * 0.1, 1e-6);
        lo -= pad;
        hi += pad;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
    auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    using detail::coord;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "  <title>" << xml_escape(title) << "</title>\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << coord(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
        << xml_escape(title) << "</text>\n";
    out << "  <rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(plot_w)
        << "\" height=\"" << coord(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (const double t : detail::nice_ticks(lo, hi)) {
        const double y = y_of(t);
        out << "  <line x1=\"" << coord(left - 4) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(left)
            << "\" y2=\"" << coord(y) << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << coord(left - 6) << "\" y=\"" << coord(y + 4) << "\" text-anchor=\"end\">"
            << format_number(t) << "</text>\n";
    }
    out << "  <text x=\"14\" y=\"" << coord(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << coord(top + plot_h / 2) << ")\">" << xml_escape(std::string(to_string(metric))) << "</text>\n";
    out << "  <text x=\"" << coord(left + plot_w / 2) << "\" y=\"" << coord(height - 10)
        << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";

    const double slot = plot_w / static_cast<double>(std::max<std::size_t>(cells.size(), 1));
    const double box_w = slot * 0.5;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const CellSummary& c = *cells[i];
        const double cx = left + slot * (static_cast<double>(i) + 0.5);
        const std::string level = format_number(c.cell.level);
        out << "  <g class=\"box\" data-level=\"" << level << "\">\n";
        if (const auto& box = metric_box(c, metric)) {
            const double x0 = cx - box_w / 2;
            out << "    <line x1=\"" << coord(cx) << "\" y1=\"" << coord(y_of(box->whisker_high)) << "\" x2=\""
                << coord(cx) << "\" y2=\"" << coord(y_of(box->q3)) << "\" stroke=\"black\"/>\n";
            out << "    <line x1=\"" << coord(cx) << "\" y1=\"" << coord(y_of(box->q1)) << "\" x2=\"" << coord(cx)
                << "\" y2=\"" << coord(y_of(box->whisker_low)) << "\" stroke=\"black\"/>\n";
            for (const double w : {box->whisker_low, box->whisker_high}) {
                out << "    <line x1=\"" << coord(cx - box_w / 4) << "\" y1=\"" << coord(y_of(w)) << "\" x2=\""
                    << coord(cx + box_w / 4) << "\" y2=\"" << coord(y_of(w)) << "\" stroke=\"black\"/>\n";
            }
            out << "    <rect x=\"" << coord(x0) << "\" y=\"" << coord(y_of(box->q3)) << "\" width=\""
                << coord(box_w) << "\" height=\"" << coord(std::max(y_of(box->q1) - y_of(box->q3), 0.5))
                << "\" fill=\"#cfd8e6\" stroke=\"black\"/>\n";
            out << "    <line x1=\"" << coord(x0) << "\" y1=\"" << coord(y_of(box->median)) << "\" x2=\""
                << coord(x0 + box_w) << "\" y2=\"" << coord(y_of(box->median))
                << "\" stroke=\"#b22222\" stroke-width=\"2\"/>\n";
            for (const double o : box->outliers) {
                out << "    <circle cx=\"" << coord(cx) << "\" cy=\"" << coord(y_of(o))
                    << "\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n";
            }
        }
        out << "  </g>\n";
        out << "  <text x=\"" << coord(cx) << "\" y=\"" << coord(top + plot_h + 16)
            << "\" text-anchor=\"middle\">" << level << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace pseudoproxy::io
