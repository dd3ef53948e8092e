#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vforms {

/// Command-line overrides carried into a scenario run; unset fields keep the
/// scenario document's declared defaults.
struct RunOptions {
    std::optional<int> quad_order;
    std::optional<double> fd_step;
    std::optional<std::uint64_t> seed;
    double tolerance_scale = 1.0;
    std::string timestamp;  // stamped into the report; empty means "now" (UTC)
};

/// Outcome of a scenario run. Exit-code contract: 0 every check passed, 1 at
/// least one check failed (a check interrupted by an error counts as failed
/// and records the error in its details), 2 the document violates the
/// scenario schema (error carries the location), 3 an internal error
/// prevented the run from producing a report. Re-running with the same seed
/// and orders reproduces report_json byte for byte apart from the timestamp
/// field.
struct RunOutcome {
    int exit_code = 0;
    std::string report_json;
    std::string human_summary;
    std::string error;
};

RunOutcome run_scenario_text(const std::string& json_text, const RunOptions& opts = {});
RunOutcome run_scenario_file(const std::string& path, const RunOptions& opts = {});

/// Bundled scenario documents, stable order; they run through the same loader
/// and schema as user-supplied files.
std::vector<std::string> bundled_scenario_names();

/// Throws std::invalid_argument for unknown names.
const std::string& bundled_scenario_text(const std::string& name);

}  // namespace vforms
