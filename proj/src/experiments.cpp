#include "fejerlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "fejerlab/asymptotics.hpp"
#include "fejerlab/errors.hpp"
#include "fejerlab/exact_oracle.hpp"
#include "fejerlab/fejer.hpp"
#include "fejerlab/format.hpp"
#include "fejerlab/rng.hpp"

namespace fejerlab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// JSON has no infinities, so non-finite numbers are stored as strings.
ordered_json jnum(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

ordered_json jvec(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (std::size_t i = 0; i < v.dim(); ++i) a.push_back(jnum(v[i]));
    return a;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

const json& require_key(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field)) {
        throw ConfigError("config field '" + field + "' is required");
    }
    return j.at(field);
}

double to_double(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            bad_field(field, "'" + s + "' is not a number");
        }
        if (used != s.size()) {
            bad_field(field, "trailing characters in '" + s + "'");
        }
        return v;
    }
    bad_field(field, "expected a number or a decimal string");
}

long long to_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) bad_field(field, "expected an integer");
    return j.get<long long>();
}

std::size_t to_count(const json& j, const std::string& field, long long lo,
                     long long hi) {
    const long long v = to_int(j, field);
    if (v < lo || v > hi) {
        bad_field(field, "must be in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
    return static_cast<std::size_t>(v);
}

Vector to_vector(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        bad_field(field, "expected a nonempty array of numbers");
    }
    std::vector<double> c;
    c.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        c.push_back(to_double(j.at(i), field + "[" + std::to_string(i) + "]"));
    }
    try {
        return Vector(std::move(c));
    } catch (const Error& e) {
        bad_field(field, e.what());
    }
}

Matrix to_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) {
        bad_field(field, "expected a nonempty array of rows");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& row = j.at(i);
        const std::string rf = field + "[" + std::to_string(i) + "]";
        if (!row.is_array()) bad_field(rf, "expected an array");
        std::vector<double> r;
        r.reserve(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) {
            r.push_back(
                to_double(row.at(k), rf + "[" + std::to_string(k) + "]"));
        }
        rows.push_back(std::move(r));
    }
    try {
        return Matrix::from_rows(rows);
    } catch (const Error& e) {
        bad_field(field, e.what());
    }
}

ThetaSpec parse_theta(const json& j) {
    if (!j.is_object() || j.size() != 1) {
        bad_field("theta", "expected exactly one of turns|radians");
    }
    ThetaSpec t;
    if (j.contains("turns")) {
        const json& arr = j.at("turns");
        if (!arr.is_array() || arr.size() != 2) {
            bad_field("theta.turns", "expected [numerator, denominator]");
        }
        t.rational = true;
        t.turns_num = to_int(arr.at(0), "theta.turns[0]");
        t.turns_den = to_int(arr.at(1), "theta.turns[1]");
        if (t.turns_den <= 0) {
            bad_field("theta.turns[1]", "denominator must be positive");
        }
        return t;
    }
    if (j.contains("radians")) {
        t.radians = to_double(j.at("radians"), "theta.radians");
        if (!std::isfinite(t.radians)) {
            bad_field("theta.radians", "must be finite");
        }
        return t;
    }
    bad_field("theta", "expected turns or radians");
}

ExperimentKind parse_kind(const json& j) {
    const json& k = require_key(j, "kind");
    if (!k.is_string()) bad_field("kind", "expected a string");
    const std::string s = k.get<std::string>();
    if (s == "rotation") return ExperimentKind::Rotation;
    if (s == "skew") return ExperimentKind::Skew;
    if (s == "shift") return ExperimentKind::Shift;
    if (s == "project") return ExperimentKind::Project;
    if (s == "oracle") return ExperimentKind::Oracle;
    bad_field("kind", "unknown kind '" + s + "'");
}

AnalysisParams parse_analysis(const json& j) {
    AnalysisParams p;
    if (!j.is_object()) bad_field("analysis", "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "tail_fraction") {
            p.tail_fraction = to_double(it.value(), "analysis.tail_fraction");
            if (!(p.tail_fraction > 0.0) || p.tail_fraction > 1.0) {
                bad_field("analysis.tail_fraction", "must lie in (0, 1]");
            }
        } else if (key == "epsilon") {
            p.epsilon = to_double(it.value(), "analysis.epsilon");
            if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
                bad_field("analysis.epsilon", "must be positive and finite");
            }
        } else if (key == "active_tol") {
            p.active_tol = to_double(it.value(), "analysis.active_tol");
            if (!(p.active_tol > 0.0) || !std::isfinite(p.active_tol)) {
                bad_field("analysis.active_tol", "must be positive and finite");
            }
        } else {
            bad_field("analysis." + key, "unknown key");
        }
    }
    return p;
}

double circular_gap_deg(double a, double b) {
    const double d = std::fabs(a - b);
    return std::min(d, 360.0 - d);
}

double rational_to_double(const BigRational& q) {
    return q.convert_to<double>();
}

// The ratio's analytic gap to the band floor is about 1/(128 n^2), which
// falls below log-gamma rounding noise somewhere past n ~ 2000.  Beyond
// that the floor is unfalsifiable in doubles, so only the ceiling is
// enforced; its margin shrinks like 1/(8n) and stays resolvable.
bool ratio_in_band(long long n, double ratio) {
    if (!(ratio < 1.0)) return false;
    if (n > 2000) return true;
    return ratio > 1.0 - 1.0 / (8.0 * static_cast<double>(n));
}

} // namespace

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Rotation: return "rotation";
        case ExperimentKind::Skew: return "skew";
        case ExperimentKind::Shift: return "shift";
        case ExperimentKind::Project: return "project";
        default: return "oracle";
    }
}

double ThetaSpec::radians_value() const {
    if (rational) {
        return 2.0 * std::numbers::pi * static_cast<double>(turns_num) /
               static_cast<double>(turns_den);
    }
    return radians;
}

ConvexSetSpec parse_set(const json& j, const std::string& field) {
    if (!j.is_object() || j.size() != 1) {
        bad_field(field,
                  "expected exactly one of singleton|ball|box|polyhedron|hull");
    }
    try {
        if (j.contains("singleton")) {
            return ConvexSetSpec(
                Singleton{to_vector(j.at("singleton"), field + ".singleton")});
        }
        if (j.contains("ball")) {
            const json& b = j.at("ball");
            return ConvexSetSpec(Ball{
                to_vector(require_key(b, "center"), field + ".ball.center"),
                to_double(require_key(b, "radius"), field + ".ball.radius")});
        }
        if (j.contains("box")) {
            const json& b = j.at("box");
            return ConvexSetSpec(
                Box{to_vector(require_key(b, "lo"), field + ".box.lo"),
                    to_vector(require_key(b, "hi"), field + ".box.hi")});
        }
        if (j.contains("polyhedron")) {
            const json& arr = j.at("polyhedron");
            if (!arr.is_array() || arr.empty()) {
                bad_field(field + ".polyhedron", "expected an array of rows");
            }
            std::vector<Halfspace> rows;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string rf =
                    field + ".polyhedron[" + std::to_string(i) + "]";
                const json& row = arr.at(i);
                rows.push_back(
                    Halfspace{to_vector(require_key(row, "a"), rf + ".a"),
                              to_double(require_key(row, "b"), rf + ".b")});
            }
            return ConvexSetSpec(Polyhedron{std::move(rows)});
        }
        if (j.contains("hull")) {
            const json& arr = j.at("hull");
            if (!arr.is_array() || arr.empty()) {
                bad_field(field + ".hull", "expected an array of points");
            }
            std::vector<Vector> pts;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                pts.push_back(to_vector(
                    arr.at(i), field + ".hull[" + std::to_string(i) + "]"));
            }
            return ConvexSetSpec(PointCloudHull{std::move(pts)});
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad_field(field, e.what());
    }
    bad_field(field, "unknown set kind");
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    static const std::set<std::string> allowed = {
        "name",   "kind",  "steps", "stop_tol", "lambda",       "x0",
        "theta",  "matrix", "trunc", "set",      "z_set",        "zbar",
        "analysis", "seed", "cert_samples", "max_n", "out"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (allowed.find(it.key()) == allowed.end()) {
            bad_field(it.key(), "unknown key");
        }
    }

    ExperimentConfig cfg;
    const json& jn = require_key(j, "name");
    if (!jn.is_string()) bad_field("name", "expected a string");
    cfg.name = jn.get<std::string>();
    if (cfg.name.empty()) bad_field("name", "must not be empty");
    for (char c : cfg.name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' ||
                        c == '.';
        if (!ok) bad_field("name", "only [A-Za-z0-9_.-] is allowed");
    }

    cfg.kind = parse_kind(j);

    if (j.contains("out")) {
        const json& o = j.at("out");
        if (!o.is_string()) bad_field("out", "expected a string");
        cfg.out_hint = o.get<std::string>();
    }
    if (j.contains("seed")) {
        const long long s = to_int(j.at("seed"), "seed");
        if (s < 0) bad_field("seed", "must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }

    if (cfg.kind == ExperimentKind::Oracle) {
        for (const char* key : {"steps", "stop_tol", "lambda", "x0", "theta",
                                "matrix", "trunc", "set", "z_set", "zbar",
                                "analysis", "cert_samples"}) {
            if (j.contains(key)) {
                bad_field(key, "not meaningful for the oracle kind");
            }
        }
        if (j.contains("max_n")) {
            cfg.oracle_max_n =
                static_cast<long long>(to_count(j.at("max_n"), "max_n", 1, 100000));
        }
        return cfg;
    }
    if (j.contains("max_n")) {
        bad_field("max_n", "only meaningful for the oracle kind");
    }

    cfg.steps = to_count(require_key(j, "steps"), "steps", 1, 5000000);
    if (j.contains("stop_tol")) {
        cfg.stop_tol = to_double(j.at("stop_tol"), "stop_tol");
        if (!(cfg.stop_tol >= 0.0) || !std::isfinite(cfg.stop_tol)) {
            bad_field("stop_tol", "must be finite and nonnegative");
        }
    }
    if (j.contains("lambda")) {
        cfg.lambda = to_double(j.at("lambda"), "lambda");
        if (!(cfg.lambda > 0.0) || cfg.lambda > 1.0) {
            bad_field("lambda", "must lie in (0, 1]");
        }
    }
    if (j.contains("x0")) cfg.x0 = to_vector(j.at("x0"), "x0");
    if (j.contains("cert_samples")) {
        cfg.cert_samples =
            to_count(j.at("cert_samples"), "cert_samples", 1, 4096);
    }
    if (j.contains("analysis")) cfg.analysis = parse_analysis(j.at("analysis"));
    if (j.contains("z_set")) cfg.z_set = parse_set(j.at("z_set"), "z_set");
    if (j.contains("zbar")) {
        const json& z = j.at("zbar");
        if (z.is_string()) {
            const auto s = z.get<std::string>();
            if (s == "zero") {
                cfg.zbar_zero = true;
            } else if (s != "auto") {
                bad_field("zbar", "expected an array, \"auto\", or \"zero\"");
            }
        } else {
            cfg.zbar = to_vector(z, "zbar");
        }
    }

    const auto forbid = [&](const char* key, const char* wanted_by) {
        if (j.contains(key)) {
            bad_field(key, std::string("only meaningful for the ") +
                               wanted_by + " kind");
        }
    };
    switch (cfg.kind) {
        case ExperimentKind::Rotation:
            cfg.theta = parse_theta(require_key(j, "theta"));
            forbid("matrix", "skew");
            forbid("trunc", "shift");
            forbid("set", "project");
            break;
        case ExperimentKind::Skew:
            cfg.matrix = to_matrix(require_key(j, "matrix"), "matrix");
            forbid("theta", "rotation");
            forbid("trunc", "shift");
            forbid("set", "project");
            break;
        case ExperimentKind::Shift:
            if (j.contains("trunc")) {
                cfg.trunc = to_count(j.at("trunc"), "trunc", 2, 10000000);
            }
            forbid("theta", "rotation");
            forbid("matrix", "skew");
            forbid("set", "project");
            break;
        case ExperimentKind::Project:
            cfg.project_set = parse_set(require_key(j, "set"), "set");
            if (!j.contains("x0")) {
                bad_field("x0", "required for the project kind");
            }
            forbid("theta", "rotation");
            forbid("matrix", "skew");
            forbid("trunc", "shift");
            break;
        default:
            break;
    }
    return cfg;
}

OperatorSpec build_operator(const ExperimentConfig& cfg) {
    const auto base = [&]() -> OperatorSpec {
        switch (cfg.kind) {
            case ExperimentKind::Rotation:
                return OperatorSpec(
                    PlanarRotationAveraged{cfg.theta.radians_value()});
            case ExperimentKind::Skew:
                return OperatorSpec(SkewResolvent{*cfg.matrix});
            case ExperimentKind::Shift: {
                const std::size_t trunc =
                    cfg.trunc != 0 ? cfg.trunc : cfg.steps + 2;
                return OperatorSpec(RightShiftAveraged{trunc});
            }
            case ExperimentKind::Project:
                return OperatorSpec(Projection{*cfg.project_set});
            default:
                throw ConfigError("the oracle kind has no operator");
        }
    }();
    if (cfg.lambda < 1.0) {
        return OperatorSpec(KMAveraged{
            std::make_shared<const OperatorSpec>(base), cfg.lambda});
    }
    return base;
}

namespace {

Vector resolve_x0(const ExperimentConfig& cfg, const OperatorSpec& op) {
    if (cfg.x0) return *cfg.x0;
    if (cfg.kind == ExperimentKind::Rotation) return Vector{1.0, 0.0};
    return Vector::basis(op.expected_dim(), 0);
}

ConvexSetSpec resolve_z_set(const ExperimentConfig& cfg, std::size_t dim) {
    if (cfg.z_set) return *cfg.z_set;
    if (cfg.kind == ExperimentKind::Project) return *cfg.project_set;
    return ConvexSetSpec(Singleton{Vector::zeros(dim)});
}

// Membership certification: sampled members of Z must be accepted by both
// routes (monotone distances, halfspace intersection), and the two routes
// must agree on a mixed bag of candidates around the orbit.
ordered_json fejer_section(const ExperimentConfig& cfg,
                           const IterationTrace& trace,
                           const ConvexSetSpec& z_set, Vector& audit_z,
                           std::vector<std::string>& failures) {
    SeededRng rng(cfg.seed);
    double radius = 0.0;
    for (const auto& p : trace.points) radius = std::max(radius, p.norm());
    const double extent = radius + 1.0;

    const auto members =
        sample_points(z_set, cfg.cert_samples, rng, extent);
    const double vtol = default_fejer_tolerance(trace.points.front());
    const auto hs = largest_fejer_halfspaces(trace);

    const auto excess_tol = [&](const Vector& z) {
        return 2.0 * vtol * (extent + z.norm() + 1.0);
    };

    double worst_violation = -kInf;
    double worst_excess = -kInf;
    bool members_ok = true;
    for (const auto& z : members) {
        const double v = fejer_violation(trace, z);
        const double e = max_halfspace_excess(hs, z);
        worst_violation = std::max(worst_violation, v);
        worst_excess = std::max(worst_excess, e);
        if (v > vtol || e > excess_tol(z)) members_ok = false;
    }
    if (!members_ok) {
        failures.push_back(
            "a sampled member of Z fails a monotonicity route");
    }

    // Mixed candidates: the members plus points of a box around the orbit,
    // most of which are far outside Z.
    const Vector& center = trace.last();
    std::vector<double> lo(center.dim()), hi(center.dim());
    for (std::size_t i = 0; i < center.dim(); ++i) {
        lo[i] = center[i] - 2.0 * extent;
        hi[i] = center[i] + 2.0 * extent;
    }
    const Vector blo{std::vector<double>(lo)}, bhi{std::vector<double>(hi)};
    std::size_t agreed = 0, checked = 0;
    const auto check_agreement = [&](const Vector& z) {
        const bool in_v = fejer_violation(trace, z) <= vtol;
        const bool in_e = max_halfspace_excess(hs, z) <= excess_tol(z);
        ++checked;
        if (in_v == in_e) ++agreed;
    };
    for (const auto& z : members) check_agreement(z);
    for (std::size_t i = 0; i < cfg.cert_samples; ++i) {
        check_agreement(rng.in_box(blo, bhi));
    }
    if (agreed != checked) {
        failures.push_back("the two membership routes disagree");
    }

    audit_z = members.front();

    ordered_json out;
    out["z_set"] = z_set.kind_name();
    out["member_samples"] = members.size();
    out["member_tol"] = jnum(vtol);
    out["max_member_violation"] = jnum(worst_violation);
    out["max_member_excess"] = jnum(worst_excess);
    out["halfspace_count"] = hs.size();
    out["route_checks"] = checked;
    out["route_agreements"] = agreed;
    return out;
}

ordered_json audit_section(const IterationTrace& trace, const Vector& z,
                           const Vector& zbar, double vtol,
                           std::vector<std::string>& failures) {
    ordered_json out;
    const std::size_t m = trace.points.size() - 1;
    const double stol = 1e-9 * (1.0 + trace.points.front().norm_sq());
    out["n"] = 0;
    out["m"] = m;
    out["slack_tol"] = jnum(stol);
    try {
        const auto rep = audit_fejer_inequalities(trace, z, zbar, 0, m, vtol);
        out["consecutive_slack"] = jnum(rep.consecutive_slack);
        out["expansion_residual"] = jnum(rep.expansion_residual);
        out["cauchy_schwarz_slack"] = jnum(rep.cauchy_schwarz_slack);
        out["window_slack"] = jnum(rep.window_slack);
        if (rep.consecutive_slack < -stol) {
            failures.push_back("consecutive audit slack is negative");
        }
        if (std::fabs(rep.expansion_residual) > stol) {
            failures.push_back("expansion identity residual is too large");
        }
        if (rep.cauchy_schwarz_slack < -stol) {
            failures.push_back("Cauchy-Schwarz audit slack is negative");
        }
        if (rep.window_slack < -stol) {
            failures.push_back("window audit slack is negative");
        }
    } catch (const Error& e) {
        out["error"] = e.what();
        failures.push_back(std::string("audit failed: ") + e.what());
    }
    return out;
}

ordered_json direction_section(const ExperimentConfig& cfg,
                               const std::vector<DirectionRecord>& records,
                               std::size_t dim,
                               std::vector<std::string>& failures) {
    const auto& par = cfg.analysis;
    ordered_json out;
    std::size_t nd = 0, nl = 0;
    for (const auto& r : records) {
        (r.kind == DirectionKind::StepDiff ? nd : nl) += 1;
    }
    out["step_diff_count"] = nd;
    out["to_limit_count"] = nl;
    out["tail_fraction"] = par.tail_fraction;
    out["cluster_epsilon"] = par.epsilon;

    for (const DirectionKind kind :
         {DirectionKind::StepDiff, DirectionKind::ToLimit}) {
        const std::string label = direction_kind_name(kind);
        try {
            const auto clusters =
                cluster_directions(records, kind, par.tail_fraction, par.epsilon);
            out[label + "_clusters"] = clusters.size();
            if (dim == 2) {
                std::vector<double> angles;
                angles.reserve(clusters.size());
                for (const auto& c : clusters) {
                    angles.push_back(angle_of(c.representative));
                }
                std::sort(angles.begin(), angles.end());
                ordered_json ja = ordered_json::array();
                for (double a : angles) ja.push_back(jnum(a));
                out[label + "_cluster_angles_deg"] = ja;
            }
        } catch (const EmptyTail&) {
            out[label + "_clusters"] = "empty";
        }
    }

    // Polar residuals over the tails of both sequences: the frozen bound
    // says the tail directions end up (numerically) polar to Z - zbar.
    const std::size_t tail_lo_d =
        nd - static_cast<std::size_t>(std::ceil(par.tail_fraction * nd));
    const std::size_t tail_lo_l =
        nl - static_cast<std::size_t>(std::ceil(par.tail_fraction * nl));
    double polar_max = -kInf;
    double ncone_max = -kInf;
    double ncone_sum = 0.0;
    std::size_t ncone_cnt = 0;
    bool any_trivial = false;
    std::size_t seen_d = 0, seen_l = 0;
    for (const auto& r : records) {
        const bool is_d = r.kind == DirectionKind::StepDiff;
        const std::size_t idx = is_d ? seen_d++ : seen_l++;
        if (idx < (is_d ? tail_lo_d : tail_lo_l)) continue;
        polar_max = std::max(polar_max, r.polar_residual);
        if (std::isinf(r.normal_cone_dist)) {
            any_trivial = true;
        } else if (!std::isnan(r.normal_cone_dist)) {
            ncone_max = std::max(ncone_max, r.normal_cone_dist);
            ncone_sum += r.normal_cone_dist;
            ++ncone_cnt;
        }
    }
    out["tail_polar_residual_max"] = jnum(polar_max);
    if (!(polar_max <= 1e-6)) {
        failures.push_back("tail polar residual exceeds 1e-6");
    }
    if (any_trivial) {
        out["tail_normal_cone"] = "trivial";
    } else if (ncone_cnt > 0) {
        out["tail_normal_cone_max"] = jnum(ncone_max);
        out["tail_normal_cone_mean"] =
            jnum(ncone_sum / static_cast<double>(ncone_cnt));
        if (!(ncone_max <= 1e-6)) {
            failures.push_back("tail normal cone distance exceeds 1e-6");
        }
    } else {
        out["tail_normal_cone"] = "unavailable";
    }
    return out;
}

// |<T x_n, x_n - T x_n>| scaled by 1 + |x_n|^2, maximized over the orbit.
// Only defined for the unrelaxed halfway-averaged isometries.
void add_orthogonality_check(const OperatorSpec& op,
                             const IterationTrace& trace, ordered_json& out,
                             std::vector<std::string>& failures) {
    double worst = 0.0;
    for (const auto& x : trace.points) {
        const double scaled =
            orthogonality_defect(op, x) / (1.0 + x.norm_sq());
        worst = std::max(worst, scaled);
    }
    out["orthogonality_defect_max_scaled"] = jnum(worst);
    if (!(worst <= 1e-12)) {
        failures.push_back("orthogonality defect exceeds 1e-12");
    }
}

ordered_json rotation_checks(const ExperimentConfig& cfg,
                             const IterationTrace& trace,
                             const std::vector<DirectionRecord>& records,
                             const Vector& zbar,
                             std::vector<std::string>& failures) {
    ordered_json out;
    const auto& par = cfg.analysis;
    if (cfg.theta.rational) {
        const auto census = rational_rotation_cluster_count(
            cfg.theta.turns_num, cfg.theta.turns_den);
        out["census_count"] = census.count;
        ordered_json offs = ordered_json::array();
        for (const auto& f : census.angles) {
            offs.push_back(std::to_string(f.num) + "/" +
                           std::to_string(f.den));
        }
        out["census_offsets_turns"] = offs;

        // A zero rotation produces no step directions at all; report that as
        // an ordinary mismatch instead of bailing out of the whole run.
        const auto try_cluster = [&](DirectionKind kind, const char* label)
            -> std::vector<DirectionCluster> {
            try {
                return cluster_directions(records, kind, par.tail_fraction,
                                          par.epsilon);
            } catch (const EmptyTail&) {
                out[std::string(label) + "_clusters"] = "empty";
                failures.push_back(std::string(label) +
                                   " direction tail is empty");
                return {};
            }
        };
        const auto tl = try_cluster(DirectionKind::ToLimit, "to_limit");
        const auto sd = try_cluster(DirectionKind::StepDiff, "step_diff");
        if (!tl.empty()) out["to_limit_clusters"] = tl.size();
        if (!sd.empty()) out["step_diff_clusters"] = sd.size();
        if (tl.size() != static_cast<std::size_t>(census.count)) {
            failures.push_back("to_limit cluster count differs from census");
        }
        if (sd.size() != static_cast<std::size_t>(census.count)) {
            failures.push_back("step_diff cluster count differs from census");
        }

        // Predicted angles: the starting direction advanced by each census
        // offset.  Compare as circular sets.
        const double base =
            angle_of(unit_direction(trace.points.front() - zbar));
        double worst = 0.0;
        for (const auto& f : census.angles) {
            const double predicted = std::fmod(
                base + 360.0 * static_cast<double>(f.num) /
                           static_cast<double>(f.den),
                360.0);
            double best = 360.0;
            for (const auto& c : tl) {
                best = std::min(
                    best, circular_gap_deg(predicted,
                                           angle_of(c.representative)));
            }
            worst = std::max(worst, best);
        }
        out["census_angle_max_err_deg"] = jnum(worst);
        if (!(worst <= 1e-6)) {
            failures.push_back(
                "to_limit cluster angles deviate from the census by more "
                "than 1e-6 deg");
        }
    } else {
        const auto try_gap = [&](DirectionKind kind, const char* label) {
            try {
                const double gap =
                    max_angular_gap(records, kind, par.tail_fraction);
                out[std::string(label) + "_max_gap_deg"] = jnum(gap);
                return gap;
            } catch (const EmptyTail&) {
                out[std::string(label) + "_max_gap_deg"] = "empty";
                return 360.0;
            }
        };
        const double gap_tl = try_gap(DirectionKind::ToLimit, "to_limit");
        try_gap(DirectionKind::StepDiff, "step_diff");
        out["gap_bound_deg"] = 10.0;
        if (!(gap_tl < 10.0)) {
            failures.push_back(
                "to_limit directions leave an angular gap of 10 deg or more");
        }
    }
    return out;
}

ordered_json skew_checks(const ExperimentConfig& cfg,
                         const IterationTrace& trace,
                         std::vector<std::string>& failures) {
    ordered_json out;
    const SkewResolvent res{*cfg.matrix};
    double worst = 0.0;
    const std::size_t upto = std::min<std::size_t>(trace.points.size(), 50);
    for (std::size_t n = 0; n < upto; ++n) {
        const Vector& x = trace.points[n];
        worst = std::max(worst,
                         resolvent_formula_check(res, x) / (1.0 + x.norm()));
    }
    out["resolvent_residual_max_scaled"] = jnum(worst);
    out["resolvent_points_checked"] = upto;
    if (!(worst <= 1e-12)) {
        failures.push_back(
            "solver route and closed form of the resolvent disagree");
    }
    return out;
}

ordered_json shift_checks(const ExperimentConfig& cfg,
                          const IterationTrace& trace,
                          std::vector<std::string>& failures) {
    ordered_json out;
    const bool canonical = !cfg.x0.has_value();
    if (!canonical) {
        out["oracle_comparison"] = "skipped: custom starting point";
    } else {
        const long long upto =
            std::min<long long>(60, static_cast<long long>(trace.steps()));
        double worst_coord = 0.0, worst_norm = 0.0, worst_inner = 0.0;
        for (long long n = 0; n <= upto; ++n) {
            const Vector& x = trace.points[static_cast<std::size_t>(n)];
            const QVector ex = shift_iterate_exact(n);
            for (const auto& [k, v] : ex.entries()) {
                const double d = std::fabs(x[static_cast<std::size_t>(k - 1)] -
                                           rational_to_double(v));
                worst_coord = std::max(worst_coord, d);
            }
            worst_norm = std::max(
                worst_norm, std::fabs(x.norm_sq() - rational_to_double(
                                                        shift_norm_sq_exact(n))));
            if (n < upto) {
                const Vector& y = trace.points[static_cast<std::size_t>(n + 1)];
                worst_inner = std::max(
                    worst_inner,
                    std::fabs(inner_product(x, y) -
                              rational_to_double(shift_inner_exact(n))));
            }
        }
        out["oracle_compared_up_to"] = upto;
        out["coord_err_max"] = jnum(worst_coord);
        out["norm_sq_err_max"] = jnum(worst_norm);
        out["inner_err_max"] = jnum(worst_inner);
        if (!(worst_coord <= 1e-12 && worst_norm <= 1e-12 &&
              worst_inner <= 1e-12)) {
            failures.push_back(
                "floating trace drifts from the exact closed forms");
        }
    }
    const long long n_final = static_cast<long long>(trace.steps());
    const double ratio = stirling_ratio(n_final);
    out["stirling_ratio_at_final"] = jnum(ratio);
    if (!ratio_in_band(n_final, ratio)) {
        failures.push_back("normalized central binomial leaves its band");
    }
    return out;
}

ordered_json project_checks(const ExperimentConfig& cfg,
                            const std::vector<DirectionRecord>& records,
                            const ConvexSetSpec& z_set, const Vector& zbar,
                            std::vector<std::string>& failures) {
    ordered_json out;
    const auto& par = cfg.analysis;
    try {
        const auto rep = no_zigzag_check(records, z_set, zbar,
                                         par.tail_fraction, par.active_tol);
        out["ray"] = jvec(rep.ray.vec());
        out["max_step_deviation"] = jnum(rep.max_step_deviation);
        out["max_limit_deviation"] = jnum(rep.max_limit_deviation);
        if (!(rep.max_step_deviation <= 1e-6 &&
              rep.max_limit_deviation <= 1e-6)) {
            failures.push_back(
                "directions stray from the unique normal ray");
        }
    } catch (const NotARay& e) {
        out["zigzag"] = std::string("not_a_ray: ") + e.what();
    }
    return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& body) {
    std::ofstream ofs(path);
    ofs << body;
    ofs.flush();
    if (!ofs) {
        throw std::runtime_error("failed to write " + path.string());
    }
}

} // namespace

ordered_json run_experiment(const ExperimentConfig& cfg,
                            const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    ordered_json summary;
    summary["name"] = cfg.name;
    summary["kind"] = experiment_kind_name(cfg.kind);

    if (cfg.kind == ExperimentKind::Oracle) {
        ordered_json suite = run_identity_suite(cfg.oracle_max_n);
        for (auto it = suite.begin(); it != suite.end(); ++it) {
            summary[it.key()] = it.value();
        }
        write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
        return summary;
    }

    summary["seed"] = cfg.seed;
    std::vector<std::string> failures;

    const auto op = std::make_shared<const OperatorSpec>(build_operator(cfg));
    const Vector x0 = resolve_x0(cfg, *op);
    const ConvexSetSpec z_set = resolve_z_set(cfg, x0.dim());
    if (z_set.dim() != x0.dim()) {
        throw ConfigError("z_set dimension differs from the orbit dimension");
    }
    if (cfg.zbar && cfg.zbar->dim() != x0.dim()) {
        throw ConfigError("zbar dimension differs from the orbit dimension");
    }

    const IterationTrace trace = iterate(op, x0, cfg.steps, cfg.stop_tol);
    const Vector zbar = cfg.zbar      ? *cfg.zbar
                        : cfg.zbar_zero ? Vector::zeros(x0.dim())
                                        : trace.last();

    ordered_json it_sec;
    it_sec["operator"] = op->kind_name();
    it_sec["steps_requested"] = cfg.steps;
    it_sec["steps_taken"] = trace.steps();
    it_sec["stop_reason"] = trace.stop_reason == StopReason::MaxSteps
                                ? "max_steps"
                                : "step_below_tol";
    it_sec["stop_tol"] = jnum(trace.stop_tol);
    it_sec["x0"] = jvec(x0);
    it_sec["final"] = jvec(trace.last());
    it_sec["final_norm"] = jnum(trace.last().norm());
    it_sec["last_step_norm"] = jnum(trace.step_norms.back());
    summary["iteration"] = it_sec;

    Vector audit_z = x0;
    summary["fejer"] = fejer_section(cfg, trace, z_set, audit_z, failures);
    summary["audit"] =
        audit_section(trace, audit_z, zbar,
                      default_fejer_tolerance(x0), failures);

    auto records = direction_sequences(trace, zbar);
    annotate_directions(records, z_set, zbar, cfg.analysis.active_tol);
    summary["directions"] =
        direction_section(cfg, records, x0.dim(), failures);

    ordered_json checks;
    switch (cfg.kind) {
        case ExperimentKind::Rotation:
            checks = rotation_checks(cfg, trace, records, zbar, failures);
            break;
        case ExperimentKind::Skew:
            checks = skew_checks(cfg, trace, failures);
            break;
        case ExperimentKind::Shift:
            checks = shift_checks(cfg, trace, failures);
            break;
        case ExperimentKind::Project:
            checks = project_checks(cfg, records, z_set, zbar, failures);
            break;
        default:
            break;
    }
    if (cfg.lambda == 1.0 && cfg.kind != ExperimentKind::Project) {
        add_orthogonality_check(*op, trace, checks, failures);
    }
    summary["checks"] = checks;

    {
        std::ostringstream os;
        write_trace_csv(trace, os);
        write_text_file(out_dir / "trace.csv", os.str());
    }
    {
        std::ostringstream os;
        write_directions_csv(records, os);
        write_text_file(out_dir / "directions.csv", os.str());
    }
    summary["outputs"] = {{"trace_csv", "trace.csv"},
                          {"directions_csv", "directions.csv"}};

    summary["pass"] = failures.empty();
    summary["failures"] = failures;
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

ordered_json run_identity_suite(long long max_n) {
    if (max_n < 1) throw ConfigError("max_n must be at least 1");
    ordered_json j;
    std::vector<std::string> failures;

    // Exact closed forms against the recurrence, all in rational
    // arithmetic: any mismatch is a hard logic error, not a rounding one.
    bool all_exact = true;
    long long checked = 0;
    QVector x = shift_iterate_exact(0);
    const BigRational half(1, 2);
    for (long long n = 0; n <= max_n; ++n) {
        const QVector next = shift_iterate_exact(n + 1);
        if (x.norm_sq() != shift_norm_sq_exact(n)) all_exact = false;
        if (x.dot(next) != shift_inner_exact(n)) all_exact = false;
        const QVector diff = x - next;
        if (diff.norm_sq() != shift_diff_norm_sq_exact(n)) all_exact = false;
        if (shift_orthogonality_exact(n) != 0) all_exact = false;
        if (next.dot(diff) != 0) all_exact = false;
        if (x.support_size() != static_cast<std::size_t>(n + 1)) {
            all_exact = false;
        }
        // One averaged-shift step applied by hand must reproduce the
        // closed-form iterate (Pascal's rule, effectively).
        for (long long k = 1; k <= n + 2; ++k) {
            if (next.coord(k) != half * (x.coord(k) + x.coord(k - 1))) {
                all_exact = false;
            }
        }
        ++checked;
        x = next;
    }

    // Normalized coordinates at spot points.
    for (long long n : {1LL, 2LL, 5LL, 13LL, 34LL, 55LL}) {
        if (n > max_n) continue;
        const QVector xn = shift_iterate_exact(n);
        const QVector xn1 = shift_iterate_exact(n + 1);
        const QVector diff = xn - xn1;
        const BigRational norm2 = shift_norm_sq_exact(n);
        const BigRational dnorm2 = shift_diff_norm_sq_exact(n);
        for (long long k : {1LL, n / 2 + 1, n + 1}) {
            if (shift_normalized_coord_sq(n, k) !=
                xn.coord(k) * xn.coord(k) / norm2) {
                all_exact = false;
            }
            if (shift_diff_normalized_coord_sq(n, k) !=
                diff.coord(k) * diff.coord(k) / dnorm2) {
                all_exact = false;
            }
        }
    }
    j["identities"] =
        ordered_json{{"max_n", max_n}, {"checked", checked},
                     {"all_exact", all_exact}};
    if (!all_exact) failures.push_back("shift identities");

    // The binomial convolution over the full grid.
    long long bad = 0, grid_checked = 0;
    for (long long m = 0; m <= 50; ++m) {
        for (long long n = 0; n <= 50; ++n) {
            for (long long r = 0; r <= 50; ++r) {
                if (!vandermonde_check(m, n, r)) ++bad;
                ++grid_checked;
            }
        }
    }
    j["vandermonde"] = ordered_json{
        {"grid_max", 50}, {"checked", grid_checked}, {"mismatches", bad}};
    if (bad != 0) failures.push_back("binomial convolution");

    // Direction census for the frozen rotation cases.
    struct CensusCase {
        long long k, l, expect;
    };
    const CensusCase cases[] = {
        {1, 5, 5}, {1, 12, 12}, {1, 3, 6}, {2, 6, 6}, {2, 10, 5}};
    bool census_ok = true;
    ordered_json jcases = ordered_json::array();
    for (const auto& c : cases) {
        const auto census = rational_rotation_cluster_count(c.k, c.l);
        bool ok = census.count == c.expect &&
                  census.angles.size() ==
                      static_cast<std::size_t>(census.count);
        for (std::size_t i = 0; ok && i < census.angles.size(); ++i) {
            const auto& f = census.angles[i];
            if (f.num < 0 || f.num >= f.den) ok = false;
            if (i > 0) {
                const auto& g = census.angles[i - 1];
                if (!(g.num * f.den < f.num * g.den)) ok = false;
            }
        }
        census_ok = census_ok && ok;
        jcases.push_back(ordered_json{{"turns", std::to_string(c.k) + "/" +
                                                    std::to_string(c.l)},
                                      {"count", census.count},
                                      {"expected", c.expect},
                                      {"ok", ok}});
    }
    bool degenerate_rejected = false;
    try {
        (void)rational_rotation_cluster_count(1, 4);
    } catch (const DegenerateTheta&) {
        try {
            (void)rational_rotation_cluster_count(3, 4);
        } catch (const DegenerateTheta&) {
            degenerate_rejected = true;
        }
    }
    j["rotation_census"] = ordered_json{{"cases", jcases},
                                        {"degenerate_rejected",
                                         degenerate_rejected}};
    if (!census_ok) failures.push_back("rotation census");
    if (!degenerate_rejected) failures.push_back("degenerate angle slipped through");

    // Normalized central binomial: strictly inside (1 - 1/(8n), 1).
    std::vector<long long> ns = {1, 2, 10, 100, 1000, max_n};
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    bool band_ok = true;
    ordered_json jst = ordered_json::array();
    for (long long n : ns) {
        const double ratio = stirling_ratio(n);
        const double lower = 1.0 - 1.0 / (8.0 * static_cast<double>(n));
        const bool ok = ratio_in_band(n, ratio);
        band_ok = band_ok && ok;
        jst.push_back(ordered_json{
            {"n", n}, {"ratio", jnum(ratio)}, {"lower", jnum(lower)},
            {"ok", ok}});
    }
    j["stirling"] =
        ordered_json{{"samples", jst}, {"all_in_band", band_ok}};
    if (!band_ok) failures.push_back("central binomial band");

    j["pass"] = failures.empty();
    j["failures"] = failures;
    return j;
}

std::string render_report_table(
    const std::vector<ordered_json>& summaries) {
    const std::vector<std::string> header = {"name", "kind", "pass", "steps",
                                             "max_violation", "failures"};
    std::vector<std::vector<std::string>> rows;
    rows.push_back(header);
    for (const auto& s : summaries) {
        std::vector<std::string> row;
        row.push_back(s.value("name", std::string("?")));
        row.push_back(s.value("kind", std::string("?")));
        row.push_back(s.value("pass", false) ? "yes" : "NO");
        if (s.contains("iteration")) {
            row.push_back(
                std::to_string(s["iteration"].value("steps_taken", 0)));
        } else {
            row.push_back("-");
        }
        if (s.contains("fejer") &&
            s["fejer"].contains("max_member_violation") &&
            s["fejer"]["max_member_violation"].is_number()) {
            row.push_back(format_double(
                s["fejer"]["max_member_violation"].get<double>()));
        } else {
            row.push_back("-");
        }
        row.push_back(std::to_string(
            s.contains("failures") ? s["failures"].size() : 0));
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream os;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            os << rows[r][c];
            if (c + 1 < rows[r].size()) {
                os << std::string(width[c] - rows[r][c].size() + 2, ' ');
            }
        }
        os << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t c = 0; c < width.size(); ++c) {
                total += width[c] + (c + 1 < width.size() ? 2 : 0);
            }
            os << std::string(total, '-') << '\n';
        }
    }
    return os.str();
}

} // namespace fejerlab
