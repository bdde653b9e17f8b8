#pragma once

#include <cstdint>
#include <random>

#include "fejerlab/vector.hpp"

namespace fejerlab {

/// Deterministic random source. The generator is the standardized
/// mt19937_64 stream, and all real-valued draws map bits to doubles
/// explicitly instead of going through std distributions, whose output may
/// differ between standard-library implementations. Same seed, same bytes.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via the Marsaglia polar method.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Uniform direction on the unit sphere.
    Vector unit_sphere(std::size_t dim) {
        while (true) {
            std::vector<double> c(dim);
            double n2 = 0.0;
            for (double& x : c) {
                x = gaussian();
                n2 += x * x;
            }
            if (n2 > 1e-30) {
                const double inv = 1.0 / std::sqrt(n2);
                for (double& x : c) x *= inv;
                return Vector(std::move(c));
            }
        }
    }

    /// Uniform point of the axis box [lo, hi].
    Vector in_box(const Vector& lo, const Vector& hi) {
        std::vector<double> c(lo.dim());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = uniform(lo[i], hi[i]);
        return Vector(std::move(c));
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace fejerlab
