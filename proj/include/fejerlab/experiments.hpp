#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fejerlab/convex_set.hpp"
#include "fejerlab/matrix.hpp"
#include "fejerlab/operators.hpp"
#include "fejerlab/vector.hpp"

namespace fejerlab {

enum class ExperimentKind { Rotation, Skew, Shift, Project, Oracle };

const char* experiment_kind_name(ExperimentKind kind);

// Rotation angle, either as a fraction of a full turn (num/den, kept as
// given; downstream code reduces it) or directly in radians.  The two
// forms steer the analysis: fractional angles get an exact direction
// census, radian angles get the angular-gap treatment.
struct ThetaSpec {
    bool rational = false;
    long long turns_num = 0;
    long long turns_den = 1;
    double radians = 0.0;

    [[nodiscard]] double radians_value() const;
};

struct AnalysisParams {
    double tail_fraction = 0.5;
    double epsilon = 1e-2;
    double active_tol = 1e-8;
};

// A fully parsed experiment description.  Optional members fall back to
// kind-specific defaults at build time (x0 to a basis vector, the shift
// truncation to steps + 2, the analysis set to the projected set or to
// the singleton at the origin).
struct ExperimentConfig {
    std::string name;
    ExperimentKind kind = ExperimentKind::Oracle;
    std::size_t steps = 0;
    double stop_tol = 0.0;
    double lambda = 1.0;
    std::optional<Vector> x0;
    ThetaSpec theta;
    std::optional<Matrix> matrix;
    std::size_t trunc = 0;
    std::optional<ConvexSetSpec> project_set;
    std::optional<ConvexSetSpec> z_set;
    std::optional<Vector> zbar;
    bool zbar_zero = false;
    AnalysisParams analysis;
    std::uint64_t seed = 1;
    std::size_t cert_samples = 64;
    long long oracle_max_n = 200;
    std::string out_hint;
};

// Set descriptions in configs look like one of
//   {"singleton": [0, 0]}
//   {"ball": {"center": [...], "radius": 1}}
//   {"box": {"lo": [...], "hi": [...]}}
//   {"polyhedron": [{"a": [...], "b": 0}, ...]}
//   {"hull": [[...], [...]]}
[[nodiscard]] ConvexSetSpec parse_set(const nlohmann::json& j,
                                      const std::string& field);

// Parses and validates one experiment object.  Numeric matrix and vector
// entries may be JSON numbers or decimal strings.  Unknown keys, missing
// required fields, and out-of-range values all raise ConfigError naming
// the offending field.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& j);

// Builds the configured operator, including the relaxation wrapper when
// lambda < 1.
[[nodiscard]] OperatorSpec build_operator(const ExperimentConfig& cfg);

// Runs one experiment and writes trace.csv, directions.csv (iterative
// kinds) and summary.json into out_dir, creating it if needed.  The
// returned summary carries a "pass" flag plus a list of failed contract
// checks; everything written is deterministic for a fixed config.
nlohmann::ordered_json run_experiment(const ExperimentConfig& cfg,
                                      const std::filesystem::path& out_dir);

// The exact-arithmetic self-checks behind the oracle experiment kind:
// closed forms for the shift iterates up to max_n, the binomial
// convolution identity over a 51^3 grid, the rotation direction census on
// frozen cases, and the normalized central-binomial ratio staying inside
// its analytic band.
nlohmann::ordered_json run_identity_suite(long long max_n);

// One text table row per summary, suitable for a terminal or a log.
std::string render_report_table(
    const std::vector<nlohmann::ordered_json>& summaries);

} // namespace fejerlab
