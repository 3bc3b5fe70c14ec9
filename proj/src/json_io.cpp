#include "sasp/json_io.hpp"

#include <fstream>

namespace sasp {

namespace {

void require_schema(const Json& json, const char* what) {
    if (!json.contains("schema_version")) {
        throw validation_error(std::string(what) + ": missing schema_version");
    }
    const int version = json.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw validation_error(std::string(what) + ": unsupported schema_version " +
                               std::to_string(version));
    }
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const Json::exception& e) {
        throw validation_error(std::string(what) + ": " + e.what());
    }
}

}  // namespace

Json params_to_json(const ProblemParams& params) {
    return Json{{"p_min", params.p_min},
                {"p_max", params.p_max},
                {"beta", params.beta},
                {"lambda_reg", params.lambda_reg},
                {"horizon", params.horizon},
                {"rate_limits", params.rate_limits}};
}

ProblemParams params_from_json(const Json& json) {
    return guarded("params", [&] {
        ProblemParams params;
        params.p_min = json.at("p_min").get<double>();
        params.p_max = json.at("p_max").get<double>();
        params.beta = json.at("beta").get<double>();
        params.lambda_reg = json.at("lambda_reg").get<double>();
        params.horizon = json.at("horizon").get<int>();
        if (json.contains("rate_limits")) {
            params.rate_limits = json.at("rate_limits").get<Vec>();
        } else {
            params.rate_limits.assign(static_cast<std::size_t>(std::max(params.horizon, 0)), 1.0);
        }
        params.validate();
        return params;
    });
}

Json instance_to_json(const Instance& instance) {
    return Json{{"schema_version", kSchemaVersion},
                {"params", params_to_json(instance.params)},
                {"prices", instance.prices}};
}

Instance instance_from_json(const Json& json) {
    return guarded("instance", [&] {
        require_schema(json, "instance");
        Instance instance;
        instance.params = params_from_json(json.at("params"));
        instance.prices = json.at("prices").get<Vec>();
        instance.validate();
        return instance;
    });
}

Json forecast_to_json(const UqForecast& forecast) {
    return Json{{"schema_version", kSchemaVersion},
                {"point", forecast.point},
                {"lower", forecast.lower},
                {"upper", forecast.upper},
                {"coverage_delta", forecast.coverage_delta}};
}

UqForecast forecast_from_json(const Json& json) {
    return guarded("forecast", [&] {
        require_schema(json, "forecast");
        UqForecast forecast;
        forecast.point = json.at("point").get<Vec>();
        forecast.lower = json.at("lower").get<Vec>();
        forecast.upper = json.at("upper").get<Vec>();
        forecast.coverage_delta = json.value("coverage_delta", 0.0);
        return forecast;
    });
}

Json cost_to_json(const CostBreakdown& cost) {
    return Json{{"signal_cost", cost.signal_cost},
                {"switching_cost", cost.switching_cost},
                {"regularizer_cost", cost.regularizer_cost},
                {"total", cost.total}};
}

Json schedule_to_json(const Schedule& schedule) {
    return Json{{"decisions", schedule.decisions}, {"utilization", schedule.utilization}};
}

Json solve_report_to_json(const SolveReport& report) {
    return Json{{"schema_version", kSchemaVersion},
                {"schedule", schedule_to_json(report.schedule)},
                {"cost", cost_to_json(report.cost)},
                {"iterations", report.iterations},
                {"residual", report.residual}};
}

Json run_record_to_json(const RunRecord& record) {
    Json json{{"schema_version", kSchemaVersion},
              {"algorithm", record.algorithm_name},
              {"schedule", schedule_to_json(record.schedule)},
              {"cost", cost_to_json(record.cost)},
              {"final_utilization_pre_compulsory", record.final_utilization_pre_compulsory},
              {"clamped", record.clamped}};
    if (record.gamma_used) json["gamma_used"] = *record.gamma_used;
    if (record.dus_used) json["dus_used"] = *record.dus_used;
    if (record.empirical_cr) json["empirical_cr"] = *record.empirical_cr;
    return json;
}

Json dus_result_to_json(const DusResult& result) {
    return Json{{"schema_version", kSchemaVersion},
                {"score", result.score},
                {"worst_scenario", result.worst_scenario},
                {"evals_used", result.evals_used},
                {"is_certified", result.is_certified}};
}

Json load_json_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw validation_error("cannot open file: " + path);
    try {
        return Json::parse(file);
    } catch (const Json::exception& e) {
        throw validation_error(path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const Json& json) {
    std::ofstream file(path);
    if (!file) throw validation_error("cannot write file: " + path);
    file << json.dump(2) << "\n";
}

}  // namespace sasp
