#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lindec {

using Vector = std::vector<double>;

/// Dense row-major matrix. Immutable in spirit: public operations return new
/// values and never leave non-finite entries behind.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    // Takes ownership of `data` (row-major, length rows*cols, finite).
    Matrix(std::size_t rows, std::size_t cols, Vector data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) {
        return {data_.data() + r * cols_, cols_};
    }

    const Vector& data() const { return data_; }
    Vector& data() { return data_; }

    Matrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);

/// beta minimizing ||X beta - y||^2 via normal equations with a fixed ridge
/// jitter (1e-8 * trace(X^T X) / cols) and Cholesky factorization. The jitter
/// makes rank-deficient designs (e.g. redundant one-hot columns) solvable
/// deterministically.
Vector solve_least_squares(const Matrix& X, const Vector& y);

void require_finite(std::span<const double> values, const char* what);

} // namespace lindec
