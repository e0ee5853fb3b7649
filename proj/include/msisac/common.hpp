// SPDX-License-Identifier: Apache-2.0
//
// msisac: multi-static OFDM sensing simulator
// Shared constants, the dense N x M grid container and the error types.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace msisac {

using cdouble = std::complex<double>;

inline constexpr double speed_of_light = 299'792'458.0; // [m/s], exact SI value
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ------------------------------------------------------------------------
// Errors
// ------------------------------------------------------------------------

/// Argument outside the documented domain of an operation.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Station placement could not satisfy the separation constraint.
struct InfeasibleGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A scatterer coincides with a station; bistatic angle undefined.
struct DegenerateGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Matrix operands with incompatible shapes.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ------------------------------------------------------------------------
// Grid<T>: dense row-major N x M container.
// Rows are subcarriers (or range bins), columns are OFDM symbols (or velocity bins).
// ------------------------------------------------------------------------

template <typename T>
class Grid {
  public:
    using value_type = T;

    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    T &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const T &operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] T *data() noexcept { return data_.data(); }
    [[nodiscard]] const T *data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    template <typename U>
    [[nodiscard]] bool same_shape(const Grid<U> &other) const noexcept
    {
        return rows_ == other.rows() && cols_ == other.cols();
    }

    bool operator==(const Grid &) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CMatrix = Grid<cdouble>;
using RMatrix = Grid<double>;

template <typename A, typename B>
void require_same_shape(const Grid<A> &a, const Grid<B> &b, const char *what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
}

/// Squared Frobenius norm.
template <typename T>
double frobenius_sq(const Grid<std::complex<T>> &g)
{
    double s = 0.0;
    for (const auto &v : g)
        s += std::norm(v);
    return s;
}

/// ||a - b||_F / ||b||_F (absolute norm when b is zero).
inline double relative_frobenius(const CMatrix &a, const CMatrix &b)
{
    require_same_shape(a, b, "relative_frobenius");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a.data()[i] - b.data()[i]);
        den += std::norm(b.data()[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double to_db(double power_ratio, double floor_db = -300.0)
{
    if (!(power_ratio > 0.0))
        return floor_db;
    const double v = 10.0 * std::log10(power_ratio);
    return v < floor_db ? floor_db : v;
}

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace msisac
