#include "fejerlab/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fejerlab/errors.hpp"
#include "fejerlab/lp.hpp"
#include "fejerlab/nnls.hpp"

namespace fejerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector project_halfspace(const Halfspace& h, const Vector& x) {
    const double excess = inner_product(h.a, x) - h.b;
    if (excess <= 0.0) return x;
    return x - (excess / h.a.norm_sq()) * h.a;
}

void require_dim(const ConvexSetSpec& set, const Vector& v, const char* what) {
    if (set.dim() != v.dim()) {
        throw DimensionMismatch(std::string(what) + ": set dimension " +
                                std::to_string(set.dim()) + " against vector " +
                                std::to_string(v.dim()));
    }
}

} // namespace

ConvexSetSpec::ConvexSetSpec(Variant v) : v_(std::move(v)) {
    if (const auto* s = std::get_if<Singleton>(&v_)) {
        if (s->c.dim() == 0) throw InvalidSet("singleton with empty point");
        dim_ = s->c.dim();
    } else if (const auto* b = std::get_if<Ball>(&v_)) {
        if (b->c.dim() == 0) throw InvalidSet("ball with empty center");
        if (!(b->r >= 0.0) || !std::isfinite(b->r)) {
            throw InvalidSet("ball radius must be finite and nonnegative");
        }
        dim_ = b->c.dim();
    } else if (const auto* bx = std::get_if<Box>(&v_)) {
        if (bx->lo.dim() == 0 || bx->lo.dim() != bx->hi.dim()) {
            throw InvalidSet("box bounds must share a nonzero dimension");
        }
        for (std::size_t i = 0; i < bx->lo.dim(); ++i) {
            if (bx->lo[i] > bx->hi[i]) {
                throw InvalidSet("box bound " + std::to_string(i) +
                                 " is crossed (lo > hi)");
            }
        }
        dim_ = bx->lo.dim();
    } else if (const auto* p = std::get_if<Polyhedron>(&v_)) {
        if (p->rows.empty()) {
            throw InvalidSet("polyhedron needs at least one row");
        }
        dim_ = p->rows.front().a.dim();
        for (const auto& row : p->rows) {
            if (row.a.dim() != dim_) {
                throw InvalidSet("polyhedron rows mix dimensions");
            }
            if (row.a.norm_sq() == 0.0) {
                throw InvalidSet("polyhedron row with zero normal");
            }
        }
    } else if (const auto* h = std::get_if<PointCloudHull>(&v_)) {
        if (h->vertices.empty()) {
            throw InvalidSet("hull needs at least one vertex");
        }
        dim_ = h->vertices.front().dim();
        for (const auto& vert : h->vertices) {
            if (vert.dim() != dim_) {
                throw InvalidSet("hull vertices mix dimensions");
            }
        }
    }
}

const char* ConvexSetSpec::kind_name() const {
    switch (v_.index()) {
        case 0: return "singleton";
        case 1: return "ball";
        case 2: return "box";
        case 3: return "polyhedron";
        default: return "hull";
    }
}

double support_function(const ConvexSetSpec& set, const Vector& d) {
    require_dim(set, d, "support_function");
    if (const auto* s = std::get_if<Singleton>(&set.data())) {
        return inner_product(s->c, d);
    }
    if (const auto* b = std::get_if<Ball>(&set.data())) {
        return inner_product(b->c, d) + b->r * d.norm();
    }
    if (const auto* bx = std::get_if<Box>(&set.data())) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.dim(); ++i) {
            s += std::max(bx->lo[i] * d[i], bx->hi[i] * d[i]);
        }
        return s;
    }
    if (const auto* h = std::get_if<PointCloudHull>(&set.data())) {
        double best = -kInf;
        for (const auto& vert : h->vertices) {
            best = std::max(best, inner_product(vert, d));
        }
        return best;
    }
    const auto& poly = std::get<Polyhedron>(set.data());
    Matrix a(poly.rows.size(), set.dim());
    std::vector<double> b(poly.rows.size(), 0.0);
    for (std::size_t r = 0; r < poly.rows.size(); ++r) {
        for (std::size_t j = 0; j < set.dim(); ++j) {
            a.set(r, j, poly.rows[r].a[j]);
        }
        b[r] = poly.rows[r].b;
    }
    const LpResult lp = lp_maximize(a, Vector(std::move(b)), d);
    switch (lp.status) {
        case LpStatus::Optimal: return lp.value;
        case LpStatus::Unbounded: return kInf;
        default: return -kInf; // sup over the empty set
    }
}

Vector project_point(const ConvexSetSpec& set, const Vector& x) {
    require_dim(set, x, "project_point");
    if (const auto* s = std::get_if<Singleton>(&set.data())) {
        return s->c;
    }
    if (const auto* b = std::get_if<Ball>(&set.data())) {
        const Vector delta = x - b->c;
        const double dist = delta.norm();
        if (dist <= b->r) return x;
        return b->c + (b->r / dist) * delta;
    }
    if (const auto* bx = std::get_if<Box>(&set.data())) {
        std::vector<double> c(x.coords());
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = std::min(std::max(c[i], bx->lo[i]), bx->hi[i]);
        }
        return Vector(std::move(c));
    }
    if (const auto* h = std::get_if<PointCloudHull>(&set.data())) {
        Matrix v(set.dim(), h->vertices.size());
        for (std::size_t j = 0; j < h->vertices.size(); ++j) {
            for (std::size_t i = 0; i < set.dim(); ++i) {
                v.set(i, j, h->vertices[j][i]);
            }
        }
        const Vector w = simplex_weights_lsq(v, x);
        return v.apply(w);
    }
    const auto& poly = std::get<Polyhedron>(set.data());
    if (poly.rows.size() == 1) {
        return project_halfspace(poly.rows.front(), x);
    }
    // Dykstra's scheme: cyclic half-space projections with per-row
    // corrections converge to the nearest point of the intersection.
    Vector u = x;
    std::vector<Vector> corr(poly.rows.size(), Vector::zeros(x.dim()));
    const double stop = 1e-15 * (1.0 + x.norm());
    for (int sweep = 0; sweep < 50000; ++sweep) {
        const Vector before = u;
        for (std::size_t r = 0; r < poly.rows.size(); ++r) {
            const Vector y = u + corr[r];
            const Vector next = project_halfspace(poly.rows[r], y);
            corr[r] = y - next;
            u = next;
        }
        if ((u - before).norm() <= stop) break;
    }
    return u;
}

std::optional<std::vector<Halfspace>> constraint_rows(const ConvexSetSpec& set) {
    if (const auto* bx = std::get_if<Box>(&set.data())) {
        std::vector<Halfspace> rows;
        const std::size_t d = set.dim();
        rows.reserve(2 * d);
        for (std::size_t i = 0; i < d; ++i) {
            rows.push_back(Halfspace{Vector::basis(d, i), bx->hi[i]});
        }
        for (std::size_t i = 0; i < d; ++i) {
            rows.push_back(Halfspace{-Vector::basis(d, i), -bx->lo[i]});
        }
        return rows;
    }
    if (const auto* p = std::get_if<Polyhedron>(&set.data())) {
        return p->rows;
    }
    return std::nullopt;
}

std::vector<std::size_t> active_rows(const std::vector<Halfspace>& rows,
                                     const Vector& zbar, double active_tol) {
    std::vector<std::size_t> active;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double excess = inner_product(rows[r].a, zbar) - rows[r].b;
        if (excess > active_tol) {
            throw ZbarNotInSet("reference point violates row " +
                               std::to_string(r) + " by " +
                               std::to_string(excess));
        }
        if (excess >= -active_tol) active.push_back(r);
    }
    return active;
}

std::vector<Vector> sample_points(const ConvexSetSpec& set, std::size_t count,
                                  SeededRng& rng, double extent_hint) {
    std::vector<Vector> out;
    out.reserve(count);
    const std::size_t d = set.dim();
    if (const auto* s = std::get_if<Singleton>(&set.data())) {
        for (std::size_t i = 0; i < count; ++i) out.push_back(s->c);
        return out;
    }
    if (const auto* b = std::get_if<Ball>(&set.data())) {
        for (std::size_t i = 0; i < count; ++i) {
            const Vector u = rng.unit_sphere(d);
            const double t =
                b->r * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
            out.push_back(b->c + t * u);
        }
        return out;
    }
    if (const auto* bx = std::get_if<Box>(&set.data())) {
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(rng.in_box(bx->lo, bx->hi));
        }
        return out;
    }
    if (const auto* h = std::get_if<PointCloudHull>(&set.data())) {
        for (std::size_t i = 0; i < count; ++i) {
            // Dirichlet(1,...,1) weights from exponential draws.
            std::vector<double> wts(h->vertices.size());
            double total = 0.0;
            for (double& w : wts) {
                w = -std::log(1.0 - rng.uniform01());
                total += w;
            }
            Vector p = Vector::zeros(d);
            for (std::size_t j = 0; j < h->vertices.size(); ++j) {
                p += (wts[j] / total) * h->vertices[j];
            }
            out.push_back(p);
        }
        return out;
    }

    // Polyhedron: find a ball inside (a Chebyshev-style center restricted
    // to a bounding box of half-width extent_hint) and sample it.
    const auto& poly = std::get<Polyhedron>(set.data());
    const double extent = std::max(extent_hint, 1.0);
    const std::size_t m = poly.rows.size();
    Matrix a(m + 2 * d, d + 1);
    std::vector<double> b(m + 2 * d, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < d; ++j) a.set(r, j, poly.rows[r].a[j]);
        a.set(r, d, poly.rows[r].a.norm());
        b[r] = poly.rows[r].b;
    }
    for (std::size_t i = 0; i < d; ++i) {
        a.set(m + 2 * i, i, 1.0);
        a.set(m + 2 * i, d, 1.0);
        b[m + 2 * i] = extent;
        a.set(m + 2 * i + 1, i, -1.0);
        a.set(m + 2 * i + 1, d, 1.0);
        b[m + 2 * i + 1] = extent;
    }
    std::vector<double> obj(d + 1, 0.0);
    obj[d] = 1.0;
    const LpResult lp = lp_maximize(a, Vector(std::move(b)), Vector(std::move(obj)));
    if (lp.status != LpStatus::Optimal || lp.value < 0.0) {
        throw InvalidSet("polyhedron has no interior ball to sample "
                         "(empty or degenerate within the search extent)");
    }
    std::vector<double> center(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) center[i] = lp.point[i];
    const Vector c(std::move(center));
    const double rho = 0.95 * lp.value;
    for (std::size_t i = 0; i < count; ++i) {
        const Vector u = rng.unit_sphere(d);
        const double t =
            rho * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
        out.push_back(c + t * u);
    }
    return out;
}

} // namespace fejerlab
