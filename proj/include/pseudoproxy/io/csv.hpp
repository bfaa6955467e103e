#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pseudoproxy/matrix.hpp"

namespace pseudoproxy::io {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Ten significant digits; "inf", "-inf", "nan" for non-finite values.
inline std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// `v` rounded to what format_number writes.
inline double round_to_format(double v)
{
    return std::isfinite(v) ? std::strtod(format_number(v).c_str(), nullptr) : v;
}

inline std::optional<double> parse_number(std::string_view field)
{
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (field.empty()) {
        return std::nullopt;
    }
    const std::string text(field);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        return std::nullopt;
    }
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

/**
 * Reads a numeric CSV matrix: one series per column, one observation per
 * row. A first row that is not entirely numeric is taken as a header.
 * Blank lines are skipped. Errors name the 1-based line number.
 */
inline Matrix read_matrix_csv(std::istream& in, const std::string& source = "<input>")
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto fields = split_fields(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        std::size_t bad_field = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto v = parse_number(fields[i]);
            if (!v || !std::isfinite(*v)) {
                numeric = false;
                bad_field = i + 1;
                break;
            }
            row.push_back(*v);
        }
        if (first_content) {
            first_content = false;
            width = fields.size();
            if (!numeric) {
                continue;  // header
            }
        }
        if (!numeric) {
            throw ParseError(source, line_no,
                             "field " + std::to_string(bad_field) + " is not a finite number");
        }
        if (row.size() != width) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError(source, line_no, "no data rows");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

inline Matrix read_matrix_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    return read_matrix_csv(in, path);
}

/// Header row is x1..xp unless `header` is given.
inline void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header = {})
{
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out << (j ? "," : "");
        out << (header.empty() ? "x" + std::to_string(j + 1) : header.at(static_cast<std::size_t>(j)));
    }
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? "," : "") << format_number(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace pseudoproxy::io
