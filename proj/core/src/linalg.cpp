#include "gapm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gapm/errors.hpp"

namespace gapm {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : init) {
        if (r.size() != cols_) {
            throw ValidationError("ragged matrix initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows, std::size_t cols_if_empty) {
    const std::size_t cols = rows.empty() ? cols_if_empty : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw ValidationError("ragged matrix: row " + std::to_string(r) + " has " +
                                  std::to_string(rows[r].size()) + " entries, expected " +
                                  std::to_string(cols));
        }
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

Vector Matrix::multiply(std::span<const double> x) const {
    Vector out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = dot(row(r), x);
    }
    return out;
}

Vector Matrix::multiply_transposed(std::span<const double> y) const {
    Vector out(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        const auto rr = row(r);
        for (std::size_t c = 0; c < cols_; ++c) out[c] += rr[c] * yr;
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool solve_dense(Matrix m, Vector rhs, double pivot_tol, Vector& z) {
    const std::size_t n = m.rows();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > std::abs(m(piv, k))) piv = r;
        }
        if (std::abs(m(piv, k)) < pivot_tol) return false;
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
            std::swap(rhs[k], rhs[piv]);
        }
        const double d = m(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = m(r, k) / d;
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) m(r, c) -= f * m(k, c);
            rhs[r] -= f * rhs[k];
        }
    }
    z.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= m(k, c) * z[c];
        z[k] = s / m(k, k);
    }
    return true;
}

}  // namespace gapm
