#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace pseudoproxy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major

/// Time series stored one per column: rows are time steps, columns are
/// predictors. Entries are always finite.
class PredictorMatrix {
public:
    PredictorMatrix() = default;

    PredictorMatrix(Eigen::Index n_rows, Eigen::Index n_cols) : data_(Matrix::Zero(n_rows, n_cols)) {}

    explicit PredictorMatrix(Matrix data) : data_(std::move(data))
    {
        if (!data_.allFinite()) {
            throw std::invalid_argument("PredictorMatrix: non-finite entry");
        }
    }

    Eigen::Index n_rows() const noexcept { return data_.rows(); }
    Eigen::Index n_cols() const noexcept { return data_.cols(); }

    const Matrix& data() const noexcept { return data_; }
    Matrix& data() noexcept { return data_; }

    auto col(Eigen::Index j) const { return data_.col(j); }
    auto col(Eigen::Index j) { return data_.col(j); }

    /// Copies the listed rows, in order, into a new matrix.
    PredictorMatrix rows(std::span<const std::size_t> indices) const
    {
        Matrix out(static_cast<Eigen::Index>(indices.size()), data_.cols());
        for (Eigen::Index j = 0; j < data_.cols(); ++j) {
            for (std::size_t i = 0; i < indices.size(); ++i) {
                out(static_cast<Eigen::Index>(i), j) = data_(checked_row(indices[i]), j);
            }
        }
        PredictorMatrix result;
        result.data_ = std::move(out);
        return result;
    }

private:
    Eigen::Index checked_row(std::size_t i) const
    {
        if (i >= static_cast<std::size_t>(data_.rows())) {
            throw std::out_of_range("PredictorMatrix: row " + std::to_string(i) + " out of range");
        }
        return static_cast<Eigen::Index>(i);
    }

    Matrix data_;
};

inline Vector select_rows(const Vector& v, std::span<const std::size_t> indices)
{
    Vector out(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= static_cast<std::size_t>(v.size())) {
            throw std::out_of_range("select_rows: index " + std::to_string(indices[i]) + " out of range");
        }
        out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(indices[i]));
    }
    return out;
}

/// Population (1/n) standard deviation.
inline double population_sd(const Eigen::Ref<const Vector>& v)
{
    if (v.size() == 0) {
        return 0.0;
    }
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

}  // namespace pseudoproxy
