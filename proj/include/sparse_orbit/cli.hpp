#pragma once

#include "sparse_orbit/dynamics.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace sparse_orbit::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_invalid = 2,
    exit_budget = 3,
};

/// Exact value of "3", "-1.25", "7/4" or a JSON number (as written).
BigRational parse_decimal(const std::string& text);

/// {"kind": "identity" | "rotation" | "skew" | "flow", "cf": {...},
///  "schedule": {...} or "terms": [[frequency, amplitude], ...],
///  "offset": ..., "time_step": ..., "tail_tol": ...}.
dynamics::System system_from_json(const nlohmann::json& spec);

/// Runs one subcommand. args excludes the program name. Results go to out
/// (or the --out file), diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparse_orbit::cli
