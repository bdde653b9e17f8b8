#pragma once

#include <cstddef>
#include <vector>

#include "fejerlab/vector.hpp"

namespace fejerlab {

/// Small dense row-major matrix. Sized for the operator gallery (a few
/// dozen rows at most), not for large linear algebra.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);

    static Matrix identity(std::size_t n);
    /// Builds from nested rows; all rows must share a length.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        return a_[i * cols_ + j];
    }
    void set(std::size_t i, std::size_t j, double v) { a_[i * cols_ + j] = v; }

    [[nodiscard]] Vector apply(const Vector& x) const;
    [[nodiscard]] Matrix transposed() const;
    [[nodiscard]] double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

/// Solves a x = b by Gaussian elimination with partial pivoting. Throws
/// SingularSystem when the best available pivot is negligible relative to
/// the matrix scale.
[[nodiscard]] Vector solve_linear(Matrix a, Vector b);

/// True when m is skew (m^T = -m) and orthogonal (m^T m = I), both
/// entrywise within tol.
[[nodiscard]] bool is_skew_orthogonal(const Matrix& m, double tol);

} // namespace fejerlab
