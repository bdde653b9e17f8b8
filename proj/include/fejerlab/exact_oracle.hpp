#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fejerlab/rational.hpp"

namespace fejerlab {

/// Binomial coefficient C(n, k) as an exact integer, via the running
/// multiplicative product. Returns 0 outside 0 <= k <= n.
[[nodiscard]] BigInt binomial(long long n, long long k);

/// Exact check of the convolution C(m+n, r) == sum_k C(m, k) C(n, r-k).
[[nodiscard]] bool vandermonde_check(long long m, long long n, long long r);

/// Sparse rational vector over coordinates 1, 2, 3, ... Zero entries are
/// never stored, so support_size() is the true support.
class QVector {
public:
    QVector() = default;

    static QVector basis(long long k);

    void set(long long k, const BigRational& v);
    [[nodiscard]] BigRational coord(long long k) const;
    [[nodiscard]] std::size_t support_size() const { return entries_.size(); }
    [[nodiscard]] const std::map<long long, BigRational>& entries() const {
        return entries_;
    }

    [[nodiscard]] BigRational dot(const QVector& rhs) const;
    [[nodiscard]] BigRational norm_sq() const { return dot(*this); }
    [[nodiscard]] QVector operator-(const QVector& rhs) const;

private:
    std::map<long long, BigRational> entries_;
};

/// n-th iterate of the averaged right shift started at the first basis
/// vector: coordinate k+1 holds C(n, k) / 2^n for k = 0..n.
[[nodiscard]] QVector shift_iterate_exact(long long n);

/// Closed form of the squared norm of the n-th iterate: C(2n, n) / 4^n.
[[nodiscard]] BigRational shift_norm_sq_exact(long long n);

/// Closed form of the inner product of consecutive iterates:
/// C(2n+1, n) / (2 * 4^n).
[[nodiscard]] BigRational shift_inner_exact(long long n);

/// Closed form of the squared step norm: |x_n|^2 / (2 (n+1)).
[[nodiscard]] BigRational shift_diff_norm_sq_exact(long long n);

/// <x_{n+1}, x_n - x_{n+1}> computed term by term; identically zero.
[[nodiscard]] BigRational shift_orthogonality_exact(long long n);

/// Squared k-th coordinate of x_n / |x_n| as an exact rational:
/// C(n, k-1)^2 / C(2n, n). Coordinates are 1-based.
[[nodiscard]] BigRational shift_normalized_coord_sq(long long n, long long k);

/// Same for the normalized step (x_n - x_{n+1}) / |x_n - x_{n+1}|.
[[nodiscard]] BigRational shift_diff_normalized_coord_sq(long long n, long long k);

/// k-th coordinate of the normalized iterate as a real, evaluated through
/// logarithms so that n in the thousands does not underflow intermediate
/// integers. Tends to 0 in n for fixed k.
[[nodiscard]] double shift_coordinate_proxy(long long n, long long k);

/// sqrt(pi n) * C(2n, n) / 4^n, evaluated with log-factorials; tends to 1.
[[nodiscard]] double stirling_ratio(long long n);

/// Reduced fraction of a full turn, 0 <= num < den.
struct TurnFraction {
    long long num = 0;
    long long den = 1;
    friend bool operator==(const TurnFraction&, const TurnFraction&) = default;
};

/// Exact census of the directions visited by the averaged planar rotation
/// with angle 2 pi k / l: the iterate directions are sign(cos)^n times the
/// n-fold rotation of the start, and the distinct angle offsets repeat with
/// a finite period. Angles are offsets from the starting direction, sorted.
struct RotationDirectionCensus {
    long long count = 0;
    std::vector<TurnFraction> angles;
};

/// Throws DegenerateTheta when cos(2 pi k / l) == 0 (quarter-turn cases).
[[nodiscard]] RotationDirectionCensus rational_rotation_cluster_count(long long k,
                                                                      long long l);

} // namespace fejerlab
