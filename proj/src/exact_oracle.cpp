#include "fejerlab/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <string>

#include "fejerlab/errors.hpp"

namespace fejerlab {

namespace {

// Row cache for the convolution check and the iterate builder, which need
// whole rows at a time. Rows are produced by the same running product the
// public binomial uses, one multiply and one exact divide per entry.
const std::vector<BigInt>& binomial_row(long long n) {
    static std::mutex mu;
    static std::map<long long, std::vector<BigInt>> rows;
    std::lock_guard<std::mutex> lock(mu);
    auto it = rows.find(n);
    if (it != rows.end()) return it->second;
    std::vector<BigInt> row(static_cast<std::size_t>(n) + 1);
    row[0] = 1;
    for (long long k = 0; k < n; ++k) {
        row[static_cast<std::size_t>(k) + 1] =
            row[static_cast<std::size_t>(k)] * (n - k) / (k + 1);
    }
    return rows.emplace(n, std::move(row)).first->second;
}

BigInt pow2(long long n) { return BigInt(1) << n; }

void require_nonnegative(long long n, const char* what) {
    if (n < 0) {
        throw IndexOutOfRange(std::string(what) + ": index " +
                              std::to_string(n) + " is negative");
    }
}

} // namespace

BigInt binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (long long i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i; // divides exactly at every step
    }
    return result;
}

bool vandermonde_check(long long m, long long n, long long r) {
    if (m < 0 || n < 0 || r < 0) return false;
    const auto& rm = binomial_row(m);
    const auto& rn = binomial_row(n);
    BigInt sum = 0;
    for (long long k = std::max<long long>(0, r - n);
         k <= std::min(m, r); ++k) {
        sum += rm[static_cast<std::size_t>(k)] *
               rn[static_cast<std::size_t>(r - k)];
    }
    return sum == binomial(m + n, r);
}

QVector QVector::basis(long long k) {
    QVector v;
    v.set(k, BigRational(1));
    return v;
}

void QVector::set(long long k, const BigRational& v) {
    if (k < 1) {
        throw IndexOutOfRange("sparse coordinate " + std::to_string(k) +
                              " must be at least 1");
    }
    if (v == 0) {
        entries_.erase(k);
    } else {
        entries_[k] = v;
    }
}

BigRational QVector::coord(long long k) const {
    const auto it = entries_.find(k);
    return it == entries_.end() ? BigRational(0) : it->second;
}

BigRational QVector::dot(const QVector& rhs) const {
    const auto* small = this;
    const auto* large = &rhs;
    if (small->entries_.size() > large->entries_.size()) std::swap(small, large);
    BigRational s = 0;
    for (const auto& [k, v] : small->entries_) {
        const auto it = large->entries_.find(k);
        if (it != large->entries_.end()) s += v * it->second;
    }
    return s;
}

QVector QVector::operator-(const QVector& rhs) const {
    QVector out = *this;
    for (const auto& [k, v] : rhs.entries_) {
        const BigRational d = out.coord(k) - v;
        out.set(k, d);
    }
    return out;
}

QVector shift_iterate_exact(long long n) {
    require_nonnegative(n, "shift_iterate_exact");
    const auto& row = binomial_row(n);
    const BigInt den = pow2(n);
    QVector x;
    for (long long k = 0; k <= n; ++k) {
        x.set(k + 1, BigRational(row[static_cast<std::size_t>(k)], den));
    }
    return x;
}

BigRational shift_norm_sq_exact(long long n) {
    require_nonnegative(n, "shift_norm_sq_exact");
    return BigRational(binomial(2 * n, n), pow2(2 * n));
}

BigRational shift_inner_exact(long long n) {
    require_nonnegative(n, "shift_inner_exact");
    return BigRational(binomial(2 * n + 1, n), 2 * pow2(2 * n));
}

BigRational shift_diff_norm_sq_exact(long long n) {
    require_nonnegative(n, "shift_diff_norm_sq_exact");
    return shift_norm_sq_exact(n) / (2 * (n + 1));
}

BigRational shift_orthogonality_exact(long long n) {
    require_nonnegative(n, "shift_orthogonality_exact");
    const QVector xn = shift_iterate_exact(n);
    const QVector xn1 = shift_iterate_exact(n + 1);
    return xn1.dot(xn - xn1);
}

BigRational shift_normalized_coord_sq(long long n, long long k) {
    require_nonnegative(n, "shift_normalized_coord_sq");
    if (k < 1) {
        throw IndexOutOfRange("coordinate index " + std::to_string(k) +
                              " must be at least 1");
    }
    const BigInt c = binomial(n, k - 1);
    return BigRational(c * c, binomial(2 * n, n));
}

BigRational shift_diff_normalized_coord_sq(long long n, long long k) {
    require_nonnegative(n, "shift_diff_normalized_coord_sq");
    if (k < 1) {
        throw IndexOutOfRange("coordinate index " + std::to_string(k) +
                              " must be at least 1");
    }
    // Coordinate k of x_n - x_{n+1} is (2 C(n,k-1) - C(n+1,k-1)) / 2^{n+1}.
    const BigInt num = 2 * binomial(n, k - 1) - binomial(n + 1, k - 1);
    const BigRational coord_sq(num * num, pow2(2 * (n + 1)));
    return coord_sq / shift_diff_norm_sq_exact(n);
}

double shift_coordinate_proxy(long long n, long long k) {
    require_nonnegative(n, "shift_coordinate_proxy");
    if (k < 1) {
        throw IndexOutOfRange("coordinate index " + std::to_string(k) +
                              " must be at least 1");
    }
    if (k - 1 > n) return 0.0;
    const BigInt num = binomial(n, k - 1);
    const BigInt den = binomial(2 * n, n);
    return std::exp(log_big(num) - 0.5 * log_big(den));
}

double stirling_ratio(long long n) {
    if (n < 1) {
        throw IndexOutOfRange("stirling_ratio wants n >= 1, got " +
                              std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    const double log_central = std::lgamma(2.0 * nd + 1.0) -
                               2.0 * std::lgamma(nd + 1.0);
    constexpr double pi = 3.14159265358979323846;
    return std::exp(0.5 * std::log(pi * nd) + log_central -
                    nd * std::log(4.0));
}

RotationDirectionCensus rational_rotation_cluster_count(long long k, long long l) {
    if (l <= 0) {
        throw DegenerateTheta("turn denominator must be positive, got " +
                              std::to_string(l));
    }
    // Reduce k/l modulo one full turn to p/q with 0 <= p < q.
    long long p = k % l;
    if (p < 0) p += l;
    long long q = l;
    const long long g = std::gcd(p, q);
    if (g > 0) {
        p /= g;
        q /= g;
    }
    if (p == 0) q = 1;

    // cos(2 pi p / q) is zero exactly at the quarter turns.
    if (q == 4 && (p == 1 || p == 3)) {
        throw DegenerateTheta("angle is an odd quarter turn; the averaged map "
                              "collapses to a point in one step");
    }
    // Negative cosine for turns strictly between 1/4 and 3/4.
    const bool cos_negative = (4 * p > q) && (4 * p < 3 * q);

    // Offsets repeat with period q, doubled when the sign flip alternates
    // with odd/even n and q cannot absorb the half turn.
    const long long period = cos_negative ? 2 * q : q;
    std::set<std::pair<long long, long long>> seen;
    for (long long n = 0; n < period; ++n) {
        // offset = n p / q (+ 1/2 when an odd number of sign flips), mod 1
        long long num = 2 * n * p;
        long long den = 2 * q;
        if (cos_negative && (n % 2 == 1)) num += q;
        num %= den;
        const long long gg = std::gcd(num, den);
        if (num == 0) {
            seen.emplace(0, 1);
        } else {
            seen.emplace(num / gg, den / gg);
        }
    }

    RotationDirectionCensus census;
    census.count = static_cast<long long>(seen.size());
    for (const auto& [num, den] : seen) {
        census.angles.push_back(TurnFraction{num, den});
    }
    std::sort(census.angles.begin(), census.angles.end(),
              [](const TurnFraction& a, const TurnFraction& b) {
                  return a.num * b.den < b.num * a.den;
              });
    return census;
}

} // namespace fejerlab
