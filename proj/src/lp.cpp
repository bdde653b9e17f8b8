#include "fejerlab/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fejerlab {

namespace {

constexpr double kEps = 1e-11;

// Classic full tableau. Columns: d positive parts, d negative parts,
// m slacks, then artificials, then the right-hand side.
struct Tableau {
    std::size_t m, ncols;
    std::vector<double> t; // (m + 1) x (ncols + 1), objective row last
    std::vector<std::size_t> basis;

    double& at(std::size_t r, std::size_t c) { return t[r * (ncols + 1) + c]; }
    double at(std::size_t r, std::size_t c) const {
        return t[r * (ncols + 1) + c];
    }
    double& rhs(std::size_t r) { return at(r, ncols); }

    void pivot(std::size_t pr, std::size_t pc) {
        const double d = at(pr, pc);
        for (std::size_t c = 0; c <= ncols; ++c) at(pr, c) /= d;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= ncols; ++c) at(r, c) -= f * at(pr, c);
        }
        basis[pr] = pc;
    }

    // One simplex phase over the current objective row. eligible(c) masks
    // out columns that may not enter (artificials in phase two).
    // Returns false when the objective is unbounded above.
    template <class Eligible>
    bool run(const Eligible& eligible) {
        for (std::size_t iter = 0; iter < 50000; ++iter) {
            // Bland: first eligible column with positive reduced profit.
            std::size_t pc = ncols;
            for (std::size_t c = 0; c < ncols; ++c) {
                if (eligible(c) && at(m, c) > kEps) {
                    pc = c;
                    break;
                }
            }
            if (pc == ncols) return true; // optimal
            // Ratio test, ties broken by smallest basis index (Bland).
            std::size_t pr = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m; ++r) {
                if (at(r, pc) > kEps) {
                    const double ratio = rhs(r) / at(r, pc);
                    if (ratio < best - kEps ||
                        (ratio < best + kEps &&
                         (pr == m || basis[r] < basis[pr]))) {
                        best = ratio;
                        pr = r;
                    }
                }
            }
            if (pr == m) return false; // unbounded
            pivot(pr, pc);
        }
        return true; // iteration cap; treat as converged at desk scale
    }
};

} // namespace

LpResult lp_maximize(const Matrix& a, const Vector& b, const Vector& c) {
    const std::size_t m = a.rows();
    const std::size_t d = c.dim();
    if (m > 0 && a.cols() != d) {
        throw DimensionMismatch("lp_maximize: matrix has " +
                                std::to_string(a.cols()) +
                                " columns, objective has " + std::to_string(d));
    }
    if (b.dim() != m) {
        throw DimensionMismatch("lp_maximize: bound vector length mismatch");
    }

    const std::size_t nstruct = 2 * d + m; // x+ | x- | slacks
    Tableau tb;
    tb.m = m;
    tb.ncols = nstruct + m; // one artificial reserved per row
    tb.t.assign((m + 1) * (tb.ncols + 1), 0.0);
    tb.basis.assign(m, 0);

    std::vector<bool> has_artificial(m, false);
    for (std::size_t r = 0; r < m; ++r) {
        const double sign = (b[r] < 0.0) ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            tb.at(r, j) = sign * a.at(r, j);
            tb.at(r, d + j) = -sign * a.at(r, j);
        }
        tb.at(r, 2 * d + r) = sign; // slack
        tb.rhs(r) = sign * b[r];
        if (sign < 0.0) {
            has_artificial[r] = true;
            tb.at(r, nstruct + r) = 1.0;
            tb.basis[r] = nstruct + r;
        } else {
            tb.basis[r] = 2 * d + r;
        }
    }

    // Phase one: drive the artificials to zero (maximize minus their sum).
    bool any_artificial = false;
    for (std::size_t r = 0; r < m; ++r) {
        if (has_artificial[r]) {
            any_artificial = true;
            for (std::size_t cidx = 0; cidx <= tb.ncols; ++cidx) {
                tb.at(m, cidx) += tb.at(r, cidx);
            }
        }
    }
    if (any_artificial) {
        for (std::size_t r = 0; r < m; ++r) {
            if (has_artificial[r]) tb.at(m, nstruct + r) = 0.0;
        }
        tb.run([](std::size_t) { return true; });
        if (tb.rhs(m) > 1e-8) {
            return LpResult{LpStatus::Infeasible, 0.0, Vector()};
        }
        // Pivot any artificial still basic (at zero) out when possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (tb.basis[r] >= nstruct) {
                for (std::size_t cidx = 0; cidx < nstruct; ++cidx) {
                    if (std::abs(tb.at(r, cidx)) > kEps) {
                        tb.pivot(r, cidx);
                        break;
                    }
                }
            }
        }
    }

    // Phase two: the real objective, artificial columns barred.
    for (std::size_t cidx = 0; cidx <= tb.ncols; ++cidx) tb.at(m, cidx) = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        tb.at(m, j) = c[j];
        tb.at(m, d + j) = -c[j];
    }
    for (std::size_t r = 0; r < m; ++r) {
        const double f = tb.at(m, tb.basis[r]);
        if (f == 0.0) continue;
        for (std::size_t cidx = 0; cidx <= tb.ncols; ++cidx) {
            tb.at(m, cidx) -= f * tb.at(r, cidx);
        }
    }
    const bool bounded =
        tb.run([&](std::size_t cidx) { return cidx < nstruct; });
    if (!bounded) {
        return LpResult{LpStatus::Unbounded,
                        std::numeric_limits<double>::infinity(), Vector()};
    }

    std::vector<double> x(d, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t bc = tb.basis[r];
        if (bc < d) {
            x[bc] += tb.rhs(r);
        } else if (bc < 2 * d) {
            x[bc - d] -= tb.rhs(r);
        }
    }
    Vector point(std::move(x));
    return LpResult{LpStatus::Optimal, inner_product(c, point), point};
}

} // namespace fejerlab
