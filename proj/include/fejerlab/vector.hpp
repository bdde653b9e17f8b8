#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "fejerlab/errors.hpp"

namespace fejerlab {

/// Dense real vector with value semantics. Every construction path
/// validates that all entries are finite, so downstream code never has to
/// re-check for NaN or infinity.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::vector<double> coords);
    Vector(std::initializer_list<double> coords);

    static Vector zeros(std::size_t dim);
    /// Standard basis vector e_k (zero-based k).
    static Vector basis(std::size_t dim, std::size_t k);

    [[nodiscard]] std::size_t dim() const { return coords_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }
    [[nodiscard]] const std::vector<double>& coords() const { return coords_; }

    [[nodiscard]] double norm_sq() const;
    /// Euclidean norm, rescaled internally when the square sum would
    /// underflow or overflow, so it is accurate even for vectors whose
    /// norm_sq() is not representable.
    [[nodiscard]] double norm() const;

    Vector& operator+=(const Vector& rhs);
    Vector& operator-=(const Vector& rhs);
    Vector& operator*=(double s);

private:
    std::vector<double> coords_;
};

[[nodiscard]] Vector operator+(Vector lhs, const Vector& rhs);
[[nodiscard]] Vector operator-(Vector lhs, const Vector& rhs);
[[nodiscard]] Vector operator-(const Vector& v);
[[nodiscard]] Vector operator*(double s, Vector v);
[[nodiscard]] Vector operator*(Vector v, double s);

/// Euclidean inner product; throws DimensionMismatch on unequal lengths.
[[nodiscard]] double inner_product(const Vector& a, const Vector& b);

/// A vector whose norm is 1 up to 1e-12. Only obtainable through
/// unit_direction or the checking constructor, so holders can rely on the
/// normalization.
class UnitVector {
public:
    explicit UnitVector(Vector v);

    [[nodiscard]] const Vector& vec() const { return v_; }
    [[nodiscard]] std::size_t dim() const { return v_.dim(); }
    [[nodiscard]] double operator[](std::size_t i) const { return v_[i]; }

private:
    Vector v_;
};

/// v / |v|. Norms at or below zero_tol count as zero and raise ZeroVector;
/// the default threshold sits just above the subnormal range so that any
/// vector with full-precision coordinates still normalizes cleanly.
[[nodiscard]] UnitVector unit_direction(const Vector& v, double zero_tol = 1e-300);

/// Angle of a planar unit vector in degrees, in [0, 360). Throws
/// DimensionMismatch unless dim == 2.
[[nodiscard]] double angle_of(const UnitVector& d);

} // namespace fejerlab
