// JSON serialization of the domain types. Documents carry a schema_version
// field (current: 1); loaders reject other versions. Emission uses ordered
// JSON so replayed runs produce byte-identical files.

#pragma once

#include <string>

#include "json.hpp"
#include "sasp/dus.hpp"
#include "sasp/offline.hpp"
#include "sasp/online.hpp"
#include "sasp/types.hpp"

namespace sasp {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json params_to_json(const ProblemParams& params);
ProblemParams params_from_json(const Json& json);

Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& json);

Json forecast_to_json(const UqForecast& forecast);
UqForecast forecast_from_json(const Json& json);

Json cost_to_json(const CostBreakdown& cost);
Json schedule_to_json(const Schedule& schedule);
Json solve_report_to_json(const SolveReport& report);
Json run_record_to_json(const RunRecord& record);
Json dus_result_to_json(const DusResult& result);

/// Reads and parses a JSON file; throws validation_error with the path and
/// parser message on failure.
Json load_json_file(const std::string& path);

void save_json_file(const std::string& path, const Json& json);

}  // namespace sasp
