#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace projld::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kVerdictViolation = 4 };

// Runs one invocation, e.g. {"simulate", "--config", "run.json", "--out", "results"}.
// args excludes the program name. Human-readable progress goes to `out`;
// failures are reported on `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a of the canonical (key-sorted, compact) JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const nlohmann::json& effective_config);

// Evenly spaced grid from {"min", "max", "step"} or an explicit {"points": [...]}.
// When (max - min) / step is an integer N the points are the exact
// interpolants ((N - k) min + k max) / N, so symmetric grids contain 0.
[[nodiscard]] std::vector<double> grid_from_json(const nlohmann::json& j);

[[nodiscard]] const char* version() noexcept;

}  // namespace projld::cli
