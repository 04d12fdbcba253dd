#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gapm {

using Vector = std::vector<double>;

/// Dense row-major matrix with value semantics.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    static Matrix from_rows(const std::vector<Vector>& rows, std::size_t cols_if_empty = 0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    const std::vector<double>& data() const noexcept { return data_; }

    /// this * x
    Vector multiply(std::span<const double> x) const;
    /// this^T * y
    Vector multiply_transposed(std::span<const double> y) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> a);

/// Solves the square system M z = rhs by Gaussian elimination with partial
/// pivoting. Returns false when a pivot falls below pivot_tol.
bool solve_dense(Matrix m, Vector rhs, double pivot_tol, Vector& z);

}  // namespace gapm
