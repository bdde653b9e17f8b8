#include "fejerlab/matrix.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace fejerlab {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix();
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw DimensionMismatch("matrix row " + std::to_string(i) +
                                    " has length " +
                                    std::to_string(rows[i].size()) +
                                    ", expected " + std::to_string(cols));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!std::isfinite(rows[i][j])) {
                throw NonFiniteValue("matrix entry (" + std::to_string(i) +
                                     "," + std::to_string(j) +
                                     ") is not finite");
            }
            m.set(i, j, rows[i][j]);
        }
    }
    return m;
}

Vector Matrix::apply(const Vector& x) const {
    if (x.dim() != cols_) {
        throw DimensionMismatch("matrix-vector product: " +
                                std::to_string(cols_) + " columns against " +
                                std::to_string(x.dim()) + " entries");
    }
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return Vector(std::move(y));
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
    return t;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

Vector solve_linear(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    if (a.cols() != n) {
        throw DimensionMismatch("solve_linear wants a square matrix");
    }
    if (b.dim() != n) {
        throw DimensionMismatch("solve_linear: right side has dimension " +
                                std::to_string(b.dim()) + ", expected " +
                                std::to_string(n));
    }
    std::vector<double> rhs(b.coords());
    const double scale = std::max(a.max_abs(), 1e-30);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a.at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double cand = std::abs(a.at(r, col));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best <= 1e-13 * scale) {
            throw SingularSystem("pivot " + std::to_string(best) +
                                 " too small at column " + std::to_string(col));
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                const double tmp = a.at(col, j);
                a.set(col, j, a.at(piv, j));
                a.set(piv, j, tmp);
            }
            std::swap(rhs[col], rhs[piv]);
        }
        const double d = a.at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) {
                a.set(r, j, a.at(r, j) - f * a.at(col, j));
            }
            rhs[r] -= f * rhs[col];
        }
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = rhs[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a.at(ii, j) * x[j];
        x[ii] = s / a.at(ii, ii);
    }
    return Vector(std::move(x));
}

bool is_skew_orthogonal(const Matrix& m, double tol) {
    const std::size_t n = m.rows();
    if (m.cols() != n) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(m.at(i, j) + m.at(j, i)) > tol) return false;
            // orthogonality: row i of m^T m is column i of m dotted with columns
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r) dot += m.at(r, i) * m.at(r, j);
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - want) > tol) return false;
        }
    }
    return true;
}

} // namespace fejerlab
