#include "fejerlab/vector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace fejerlab {

namespace {

void require_finite(const std::vector<double>& coords) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!std::isfinite(coords[i])) {
            throw NonFiniteValue("vector entry " + std::to_string(i) +
                                 " is not finite");
        }
    }
}

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch(std::string(what) + ": dimensions " +
                                std::to_string(a.dim()) + " and " +
                                std::to_string(b.dim()) + " differ");
    }
}

} // namespace

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords)) {
    require_finite(coords_);
}

Vector::Vector(std::initializer_list<double> coords) : coords_(coords) {
    require_finite(coords_);
}

Vector Vector::zeros(std::size_t dim) {
    return Vector(std::vector<double>(dim, 0.0));
}

Vector Vector::basis(std::size_t dim, std::size_t k) {
    if (k >= dim) {
        throw IndexOutOfRange("basis index " + std::to_string(k) +
                              " outside dimension " + std::to_string(dim));
    }
    std::vector<double> c(dim, 0.0);
    c[k] = 1.0;
    return Vector(std::move(c));
}

double Vector::norm_sq() const {
    double s = 0.0;
    for (double x : coords_) s += x * x;
    return s;
}

double Vector::norm() const {
    const double s = norm_sq();
    // The plain square sum is fine as long as it stays normal.  Once it
    // underflows (coordinates below ~1e-154) or overflows, rescale by the
    // largest magnitude so the norm keeps full relative precision over
    // the whole representable range.
    if (s >= std::numeric_limits<double>::min() &&
        s <= std::numeric_limits<double>::max()) {
        return std::sqrt(s);
    }
    double m = 0.0;
    for (double x : coords_) m = std::max(m, std::fabs(x));
    if (m == 0.0) return 0.0;
    double acc = 0.0;
    for (double x : coords_) {
        const double t = x / m;
        acc += t * t;
    }
    return m * std::sqrt(acc);
}

Vector& Vector::operator+=(const Vector& rhs) {
    require_same_dim(*this, rhs, "vector sum");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
    // Arithmetic must uphold the constructor's all-finite invariant, or an
    // overflow would travel silently through every later analysis.
    require_finite(coords_);
    return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
    require_same_dim(*this, rhs, "vector difference");
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
    require_finite(coords_);
    return *this;
}

Vector& Vector::operator*=(double s) {
    for (double& x : coords_) x *= s;
    require_finite(coords_);
    return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }

Vector operator-(const Vector& v) {
    std::vector<double> c(v.coords());
    for (double& x : c) x = -x;
    return Vector(std::move(c));
}

Vector operator*(double s, Vector v) { return v *= s; }
Vector operator*(Vector v, double s) { return v *= s; }

double inner_product(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "inner product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

UnitVector::UnitVector(Vector v) : v_(std::move(v)) {
    const double n = v_.norm();
    if (std::abs(n - 1.0) > 1e-12) {
        throw InvalidUnitVector("norm " + std::to_string(n) +
                                " is not 1 within 1e-12");
    }
}

UnitVector unit_direction(const Vector& v, double zero_tol) {
    const double n = v.norm();
    if (n <= zero_tol) {
        throw ZeroVector("cannot take the direction of a vector with norm " +
                         std::to_string(n));
    }
    std::vector<double> c(v.coords());
    for (double& x : c) x /= n;
    return UnitVector(Vector(std::move(c)));
}

double angle_of(const UnitVector& d) {
    if (d.dim() != 2) {
        throw DimensionMismatch("angle_of wants dimension 2, got " +
                                std::to_string(d.dim()));
    }
    constexpr double rad_to_deg = 180.0 / 3.14159265358979323846;
    double deg = std::atan2(d[1], d[0]) * rad_to_deg;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    if (deg == 0.0) deg = 0.0; // normalize -0 to +0
    return deg;
}

} // namespace fejerlab
