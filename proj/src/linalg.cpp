#include "lindec/linalg.hpp"

#include <cmath>
#include <string>

#include "lindec/errors.hpp"

namespace lindec {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(std::string(what) + ": non-finite value");
        }
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (!std::isfinite(fill)) throw Error("Matrix: non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                         " does not equal rows*cols = " + std::to_string(rows_ * cols_));
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    require_finite(out.data(), "matmul result");
    return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) {
        throw ShapeError("matvec: matrix has " + std::to_string(a.cols()) +
                         " cols, vector has " + std::to_string(x.size()));
    }
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const auto row = a.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) s += row[k] * x[k];
        out[i] = s;
    }
    require_finite(out, "matvec result");
    return out;
}

namespace {

// Cholesky solve of A x = b for symmetric positive definite A (in place on
// a copy). Throws if a pivot is not strictly positive.
Vector cholesky_solve(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    // Factor A = L L^T, storing L in the lower triangle.
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0)) {
            throw Error("cholesky: matrix not positive definite");
        }
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    // Forward substitution L z = b.
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
        b[i] = s / a(i, i);
    }
    // Back substitution L^T x = z.
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * b[k];
        b[ii] = s / a(ii, ii);
    }
    return b;
}

} // namespace

Vector solve_least_squares(const Matrix& X, const Vector& y) {
    if (X.rows() == 0 || X.cols() == 0 || y.empty()) {
        throw EmptyDataError("solve_least_squares: empty input");
    }
    if (X.rows() != y.size()) {
        throw ShapeError("solve_least_squares: X has " + std::to_string(X.rows()) +
                         " rows, y has " + std::to_string(y.size()));
    }
    const std::size_t d = X.cols();

    // Normal equations with ridge jitter proportional to trace(X^T X).
    Matrix xtx(d, d, 0.0);
    double trace = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto row = X.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = row[i];
            if (xi == 0.0) continue;
            for (std::size_t j = i; j < d; ++j) {
                xtx(i, j) += xi * row[j];
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        trace += xtx(i, i);
        for (std::size_t j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);
    }
    const double jitter = 1e-8 * trace / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) xtx(i, i) += jitter;

    Vector xty(d, 0.0);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto row = X.row(r);
        const double yr = y[r];
        for (std::size_t i = 0; i < d; ++i) xty[i] += row[i] * yr;
    }

    Vector beta = cholesky_solve(std::move(xtx), std::move(xty));
    require_finite(beta, "solve_least_squares result");
    return beta;
}

} // namespace lindec
