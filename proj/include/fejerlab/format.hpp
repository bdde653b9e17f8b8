#pragma once

#include <string>

namespace fejerlab {

/// Shortest decimal string that parses back to exactly the same double.
/// Infinities format as "inf"/"-inf". Used for every float written to CSV
/// so that artifact files are byte-stable across runs.
[[nodiscard]] std::string format_double(double v);

} // namespace fejerlab
