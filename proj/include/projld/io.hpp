#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "projld/atyp.hpp"
#include "projld/directions.hpp"
#include "projld/dist.hpp"
#include "projld/legendre.hpp"
#include "projld/lmgf.hpp"
#include "projld/mc.hpp"

namespace projld::io {

using json = nlohmann::json;

// Shortest decimal string that parses back to the same double; "inf",
// "-inf" and "nan" for non-finite values.
[[nodiscard]] std::string format_number(double v);

// {"family": "...", "params": {...}}; parsing rejects unknown or missing fields.
[[nodiscard]] json to_json(const DistributionSpec& spec);
[[nodiscard]] DistributionSpec spec_from_json(const json& j);

// CSV "w,value,tilt,attained"; +infinity as "inf", missing tilt as an empty field.
[[nodiscard]] std::string to_csv(const RateFunctionTable& table);
// Infinite values are null with "infinite": true.
[[nodiscard]] json to_json(const RateFunctionTable& table);

inline constexpr const char* kReportCsvHeader = "dist,mode,n,w,tilt,p_hat,stderr,rate_hat,samples,seed";
[[nodiscard]] std::string to_csv_row(const SimulationReport& rep);
[[nodiscard]] json to_json(const SimulationReport& rep);

// CSV "n,t,gap,seed".
[[nodiscard]] std::string to_csv(const std::vector<ProfileRow>& rows);
[[nodiscard]] json to_json(const std::vector<MedianGap>& medians);

// CSV "w,cramer,universal,gap".
[[nodiscard]] std::string to_csv(const ComparisonTable& table);
[[nodiscard]] json to_json(const ComparisonTable& table);
[[nodiscard]] json to_json(const HypothesisReport& rep);

// One value per line, plus a JSON sidecar with mode, n, seed and normalisation.
[[nodiscard]] std::string to_csv(const DirectionArray& arr);
[[nodiscard]] json sidecar_json(const DirectionArray& arr);

}  // namespace projld::io
