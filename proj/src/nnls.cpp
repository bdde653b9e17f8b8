#include "fejerlab/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fejerlab/errors.hpp"

namespace fejerlab {

namespace {

// Normal-equation solve restricted to the columns in sup. An optional
// ridge keeps rank-deficient supports (duplicated or affinely dependent
// columns) solvable; the perturbation is far below every tolerance used
// by callers.
Vector restricted_lsq(const Matrix& g, const Vector& d,
                      const std::vector<std::size_t>& sup, double ridge) {
    const std::size_t p = sup.size();
    Matrix gtg(p, p);
    std::vector<double> gtd(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < g.rows(); ++r) {
                s += g.at(r, sup[i]) * g.at(r, sup[j]);
            }
            gtg.set(i, j, s + ((i == j) ? ridge : 0.0));
        }
        double s = 0.0;
        for (std::size_t r = 0; r < g.rows(); ++r) s += g.at(r, sup[i]) * d[r];
        gtd[i] = s;
    }
    return solve_linear(gtg, Vector(std::move(gtd)));
}

Vector gradient(const Matrix& g, const Vector& d, const Vector& w) {
    // g^T (d - g w)
    std::vector<double> res(g.rows(), 0.0);
    for (std::size_t r = 0; r < g.rows(); ++r) {
        double s = d[r];
        for (std::size_t c = 0; c < g.cols(); ++c) s -= g.at(r, c) * w[c];
        res[r] = s;
    }
    std::vector<double> out(g.cols(), 0.0);
    for (std::size_t c = 0; c < g.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < g.rows(); ++r) s += g.at(r, c) * res[r];
        out[c] = s;
    }
    return Vector(std::move(out));
}

} // namespace

Vector nnls(const Matrix& g, const Vector& d) {
    const std::size_t m = g.cols();
    if (g.rows() != d.dim()) {
        throw DimensionMismatch("nnls: matrix rows and target length differ");
    }
    std::vector<double> w(m, 0.0);
    std::vector<bool> passive(m, false);
    std::vector<std::size_t> sup;

    double scale = 0.0;
    {
        const Vector g0 = gradient(g, d, Vector::zeros(m));
        for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(g0[j]));
    }
    const double tol = 1e-12 * std::max(1.0, scale);

    for (std::size_t outer = 0; outer < 6 * m + 12; ++outer) {
        const Vector grad = gradient(g, d, Vector(std::vector<double>(w)));
        std::size_t best = m;
        double best_val = tol;
        for (std::size_t j = 0; j < m; ++j) {
            if (!passive[j] && grad[j] > best_val) {
                best_val = grad[j];
                best = j;
            }
        }
        if (best == m) break; // KKT satisfied
        passive[best] = true;
        sup.push_back(best);

        for (std::size_t inner = 0; inner < 4 * m + 8; ++inner) {
            Vector s;
            try {
                s = restricted_lsq(g, d, sup, 0.0);
            } catch (const SingularSystem&) {
                s = restricted_lsq(g, d, sup, 1e-10 * std::max(1.0, scale));
            }
            bool all_positive = true;
            for (std::size_t i = 0; i < sup.size(); ++i) {
                if (s[i] <= tol) {
                    all_positive = false;
                    break;
                }
            }
            if (all_positive) {
                for (std::size_t i = 0; i < sup.size(); ++i) w[sup[i]] = s[i];
                break;
            }
            // Step toward s until the first coordinate hits zero, drop it.
            double alpha = 1.0;
            for (std::size_t i = 0; i < sup.size(); ++i) {
                if (s[i] <= tol) {
                    const double wi = w[sup[i]];
                    const double denom = wi - s[i];
                    if (denom > 0.0) alpha = std::min(alpha, wi / denom);
                }
            }
            for (std::size_t i = 0; i < sup.size(); ++i) {
                w[sup[i]] += alpha * (s[i] - w[sup[i]]);
            }
            std::vector<std::size_t> kept;
            for (std::size_t idx : sup) {
                if (w[idx] > tol) {
                    kept.push_back(idx);
                } else {
                    w[idx] = 0.0;
                    passive[idx] = false;
                }
            }
            sup = std::move(kept);
            if (sup.empty()) break;
        }
    }
    return Vector(std::move(w));
}

Vector simplex_weights_lsq(const Matrix& v, const Vector& x) {
    const std::size_t m = v.cols();
    if (m == 0) {
        throw DimensionMismatch("simplex_weights_lsq needs at least one column");
    }
    if (v.rows() != x.dim()) {
        throw DimensionMismatch("simplex_weights_lsq: row count mismatch");
    }

    // Start from the single nearest column.
    std::size_t start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        double dist = 0.0;
        for (std::size_t r = 0; r < v.rows(); ++r) {
            const double diff = v.at(r, j) - x[r];
            dist += diff * diff;
        }
        if (dist < best) {
            best = dist;
            start = j;
        }
    }
    std::vector<double> w(m, 0.0);
    w[start] = 1.0;
    std::vector<std::size_t> sup{start};
    std::vector<bool> active(m, false);
    active[start] = true;
    const double tol = 1e-11 * std::max(1.0, v.max_abs() * v.max_abs());

    // KKT solve on the support: [V^T V, -1; 1^T, 0] (w, lambda) = (V^T x, 1).
    const auto kkt_solve = [&](double ridge) {
        const std::size_t p = sup.size();
        Matrix k(p + 1, p + 1);
        std::vector<double> rhs(p + 1, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < v.rows(); ++r) {
                    s += v.at(r, sup[i]) * v.at(r, sup[j]);
                }
                k.set(i, j, s + ((i == j) ? ridge : 0.0));
            }
            k.set(i, p, -1.0);
            k.set(p, i, 1.0);
            double s = 0.0;
            for (std::size_t r = 0; r < v.rows(); ++r) s += v.at(r, sup[i]) * x[r];
            rhs[i] = s;
        }
        rhs[p] = 1.0;
        return solve_linear(k, Vector(std::move(rhs)));
    };

    for (std::size_t iter = 0; iter < 20 * m + 40; ++iter) {
        Vector sol;
        try {
            sol = kkt_solve(0.0);
        } catch (const SingularSystem&) {
            sol = kkt_solve(1e-10 * std::max(1.0, v.max_abs() * v.max_abs()));
        }
        bool interior = true;
        for (std::size_t i = 0; i < sup.size(); ++i) {
            if (sol[i] <= -1e-14) {
                interior = false;
                break;
            }
        }
        if (!interior) {
            double alpha = 1.0;
            for (std::size_t i = 0; i < sup.size(); ++i) {
                if (sol[i] <= 0.0) {
                    const double wi = w[sup[i]];
                    const double denom = wi - sol[i];
                    if (denom > 0.0) alpha = std::min(alpha, wi / denom);
                }
            }
            for (std::size_t i = 0; i < sup.size(); ++i) {
                w[sup[i]] += alpha * (sol[i] - w[sup[i]]);
            }
            std::vector<std::size_t> kept;
            for (std::size_t idx : sup) {
                if (w[idx] > 1e-13) {
                    kept.push_back(idx);
                } else {
                    w[idx] = 0.0;
                    active[idx] = false;
                }
            }
            if (kept.empty()) kept.push_back(sup.front()); // keep one anchor
            active[kept.front()] = true;
            sup = std::move(kept);
            continue;
        }
        for (std::size_t i = 0; i < sup.size(); ++i) {
            w[sup[i]] = std::max(0.0, sol[i]);
        }
        const double lambda = sol[sup.size()];

        // Multiplier test over the inactive columns.
        std::vector<double> resid(v.rows(), 0.0);
        for (std::size_t r = 0; r < v.rows(); ++r) {
            double s = -x[r];
            for (std::size_t j = 0; j < m; ++j) s += v.at(r, j) * w[j];
            resid[r] = s;
        }
        std::size_t enter = m;
        double most_negative = -tol;
        for (std::size_t j = 0; j < m; ++j) {
            if (active[j]) continue;
            double gj = 0.0;
            for (std::size_t r = 0; r < v.rows(); ++r) gj += v.at(r, j) * resid[r];
            const double mu = gj - lambda;
            if (mu < most_negative) {
                most_negative = mu;
                enter = j;
            }
        }
        if (enter == m) break; // optimal
        active[enter] = true;
        sup.push_back(enter);
    }
    return Vector(std::move(w));
}

} // namespace fejerlab
