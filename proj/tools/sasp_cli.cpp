// Command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 solver failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sasp/data.hpp"
#include "sasp/dus.hpp"
#include "sasp/experiments.hpp"
#include "sasp/json_io.hpp"
#include "sasp/offline.hpp"
#include "sasp/online.hpp"
#include "sasp/types.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

int default_jobs(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("SASP_JOBS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

void print_fixed(double value) { std::printf("%.6f\n", value); }

int usage_error(const std::string& message) {
    std::cerr << "usage error: " << message << "\n";
    return kExitUsage;
}

struct RunOptions {
    std::string algorithm;
    std::string instance_path;
    std::string forecast_path;
    double trust = 0.5;
    bool trust_set = false;
    std::uint64_t seed = 0;
    int budget = 500;
    int starts = 16;
    int refine = 8;
    int jobs = 0;
    std::string out_path;
};

sasp::DusConfig dus_config_from(const RunOptions& options) {
    sasp::DusConfig config;
    config.eval_budget = options.budget;
    config.n_starts = options.starts;
    config.refine_iters = options.refine;
    config.seed = options.seed;
    config.jobs = default_jobs(options.jobs);
    return config;
}

int cmd_solve(const std::string& instance_path, const std::string& out_path) {
    const sasp::Instance instance =
        sasp::instance_from_json(sasp::load_json_file(instance_path));
    const sasp::SolveReport report = sasp::solve_opt(instance.params, instance.prices);
    if (!out_path.empty()) {
        sasp::save_json_file(out_path, sasp::solve_report_to_json(report));
    }
    print_fixed(report.cost.total);
    return kExitOk;
}

int cmd_run(const RunOptions& options) {
    const sasp::Instance instance =
        sasp::instance_from_json(sasp::load_json_file(options.instance_path));

    sasp::RunRecord record;
    if (options.algorithm == "roro") {
        record = sasp::roro_run(instance);
    } else if (options.algorithm == "threshold") {
        record = sasp::threshold_run(instance);
    } else if (options.algorithm == "uq-advice") {
        const sasp::UqForecast forecast =
            sasp::forecast_from_json(sasp::load_json_file(options.forecast_path));
        record = sasp::uq_advice_run(instance, forecast, dus_config_from(options));
    } else {  // ro-advice
        const sasp::UqForecast forecast =
            sasp::forecast_from_json(sasp::load_json_file(options.forecast_path));
        record = sasp::ro_advice_run(instance, forecast.point, options.trust);
    }

    const sasp::SolveReport opt =
        sasp::opt_deterministic_tiebreak(instance.params, instance.prices);
    record.empirical_cr = sasp::empirical_cr(record, opt);
    if (!options.out_path.empty()) {
        sasp::save_json_file(options.out_path, sasp::run_record_to_json(record));
    }
    print_fixed(*record.empirical_cr);
    return kExitOk;
}

int cmd_dus(const RunOptions& options) {
    const sasp::Instance instance =
        sasp::instance_from_json(sasp::load_json_file(options.instance_path));
    const sasp::UqForecast forecast =
        sasp::forecast_from_json(sasp::load_json_file(options.forecast_path));
    const sasp::DusResult result =
        sasp::dus_solve(instance.params, forecast, dus_config_from(options));
    if (!options.out_path.empty()) {
        sasp::save_json_file(options.out_path, sasp::dus_result_to_json(result));
    }
    print_fixed(result.score);
    return kExitOk;
}

int cmd_synth(const RunOptions& options, double xi) {
    const sasp::Instance instance =
        sasp::instance_from_json(sasp::load_json_file(options.instance_path));
    sasp::SynthUqConfig config;
    config.xi = xi;
    config.seed = options.seed;
    const sasp::UqForecast forecast =
        sasp::synth_uq(instance, config, dus_config_from(options));
    const sasp::Json json = sasp::forecast_to_json(forecast);
    if (!options.out_path.empty()) {
        sasp::save_json_file(options.out_path, json);
    } else {
        std::cout << json.dump(2) << "\n";
    }
    return kExitOk;
}

void print_summary(const sasp::ExperimentResult& result) {
    std::printf("%-20s %12s %12s %8s\n", "algorithm", "mean", "p95", "count");
    for (std::size_t a = 0; a < result.algorithms.size(); ++a) {
        std::printf("%-20s %12.6f %12.6f %8zu\n", result.algorithms[a].c_str(),
                    result.stats[a].mean, result.stats[a].p95, result.stats[a].count);
    }
    if (result.trust_star) {
        std::printf("trust_star = %.2f\n", *result.trust_star);
    }
    if (result.failures > 0) {
        std::printf("excluded %zu failed instances\n", result.failures);
    }
}

sasp::Json records_to_json(const sasp::ExperimentResult& result) {
    sasp::Json records = sasp::Json::array();
    for (const auto& per_algorithm : result.records) {
        sasp::Json list = sasp::Json::array();
        for (const sasp::RunRecord& record : per_algorithm) {
            list.push_back(sasp::run_record_to_json(record));
        }
        records.push_back(list);
    }
    sasp::Json json{{"schema_version", sasp::kSchemaVersion},
                    {"config", sasp::config_to_json(result.config)},
                    {"algorithms", result.algorithms},
                    {"records", records}};
    if (result.trust_star) json["trust_star"] = *result.trust_star;
    return json;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir, int jobs) {
    sasp::ExperimentConfig config =
        sasp::config_from_json(sasp::load_json_file(config_path));
    if (jobs > 0 || std::getenv("SASP_JOBS")) config.jobs = default_jobs(jobs);
    const sasp::ExperimentResult result = sasp::run_experiment(config);
    sasp::emit_report(result, out_dir);
    sasp::save_json_file((std::filesystem::path(out_dir) / "records.json").string(),
                         records_to_json(result));
    print_summary(result);
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::vector<std::string>& values, const std::string& out_dir, int jobs) {
    sasp::ExperimentConfig config =
        sasp::config_from_json(sasp::load_json_file(config_path));
    if (jobs > 0 || std::getenv("SASP_JOBS")) config.jobs = default_jobs(jobs);
    const sasp::ExperimentResult result = sasp::sweep(config, parameter, values);
    sasp::emit_report(result, out_dir);
    std::printf("%-12s %-20s %12s\n", "value", "algorithm", "mean_cr");
    for (const sasp::SweepRow& row : result.sweep_rows) {
        std::printf("%-12s %-20s %12.6f\n", row.param_value.c_str(), row.algorithm.c_str(),
                    row.mean_cr);
    }
    for (const std::string& skipped : result.skipped_values) {
        std::printf("skipped %s\n", skipped.c_str());
    }
    return kExitOk;
}

int cmd_report(const std::string& records_path, const std::string& out_dir) {
    const sasp::Json json = sasp::load_json_file(records_path);
    try {
        sasp::ExperimentResult result;
        result.config = sasp::config_from_json(json.at("config"));
        result.algorithms = json.at("algorithms").get<std::vector<std::string>>();
        if (json.contains("trust_star")) result.trust_star = json.at("trust_star").get<double>();
        for (const sasp::Json& list : json.at("records")) {
            sasp::Vec crs;
            std::vector<sasp::RunRecord> records;
            for (const sasp::Json& item : list) {
                sasp::RunRecord record;
                record.algorithm_name = item.at("algorithm").get<std::string>();
                record.schedule = sasp::Schedule::from_decisions(
                    item.at("schedule").at("decisions").get<sasp::Vec>());
                record.cost.total = item.at("cost").at("total").get<double>();
                if (item.contains("empirical_cr")) {
                    record.empirical_cr = item.at("empirical_cr").get<double>();
                    crs.push_back(*record.empirical_cr);
                }
                records.push_back(std::move(record));
            }
            result.instances_evaluated = std::max(result.instances_evaluated, records.size());
            result.records.push_back(std::move(records));
            result.stats.push_back(crs.empty() ? sasp::AggregateStats{} : sasp::aggregate(crs));
        }
        sasp::emit_report(result, out_dir);
        print_summary(result);
        return kExitOk;
    } catch (const sasp::Json::exception& e) {
        throw sasp::validation_error(std::string("records: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signal-aware workload shifting: offline optimum, robust and "
                 "learning-augmented online algorithms, and a trace-driven "
                 "experiment harness"};
    app.require_subcommand(1);

    RunOptions options;
    double xi = 0.0;
    std::string config_path, out_dir, parameter, records_path;
    std::vector<std::string> sweep_values;
    int jobs = 0;

    auto* solve = app.add_subcommand("solve", "Solve the offline optimum for an instance");
    solve->add_option("--instance", options.instance_path, "Instance JSON file")->required();
    solve->add_option("--out", options.out_path, "Write the solve report JSON here");

    auto* run = app.add_subcommand("run", "Run one online algorithm on an instance");
    run->add_option("--algorithm", options.algorithm,
                    "One of: roro, uq-advice, ro-advice, threshold")
        ->required();
    run->add_option("--instance", options.instance_path, "Instance JSON file")->required();
    run->add_option("--forecast", options.forecast_path,
                    "Forecast JSON file (required for advice algorithms)");
    run->add_option("--trust", options.trust, "RO-Advice trust weight in [0, 1]")
        ->capture_default_str();
    run->add_option("--seed", options.seed, "Seed for the uncertainty-score search")
        ->capture_default_str();
    run->add_option("--budget", options.budget, "Uncertainty-score solve budget")
        ->capture_default_str();
    run->add_option("--jobs", options.jobs, "Parallel jobs (default: SASP_JOBS or 1)");
    run->add_option("--out", options.out_path, "Write the run record JSON here");

    auto* dus = app.add_subcommand("dus", "Compute the decision uncertainty score");
    dus->add_option("--instance", options.instance_path, "Instance JSON file")->required();
    dus->add_option("--forecast", options.forecast_path, "Forecast JSON file")->required();
    dus->add_option("--budget", options.budget, "Offline-solve budget")->capture_default_str();
    dus->add_option("--starts", options.starts, "Multi-start candidates")->capture_default_str();
    dus->add_option("--refine", options.refine, "Golden-section iterations per coordinate")
        ->capture_default_str();
    dus->add_option("--seed", options.seed, "Search seed")->capture_default_str();
    dus->add_option("--jobs", options.jobs, "Parallel jobs (default: SASP_JOBS or 1)");
    dus->add_option("--out", options.out_path, "Write the score JSON here");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic UQ forecast");
    synth->add_option("--instance", options.instance_path, "Instance JSON file")->required();
    synth->add_option("--xi", xi, "Uncertainty width knob in [0, 1]")->required();
    synth->add_option("--seed", options.seed, "Generator seed")->capture_default_str();
    synth->add_option("--budget", options.budget, "Uncertainty-score solve budget")
        ->capture_default_str();
    synth->add_option("--jobs", options.jobs, "Parallel jobs (default: SASP_JOBS or 1)");
    synth->add_option("--out", options.out_path, "Write the forecast JSON here");

    auto* experiment = app.add_subcommand("experiment", "Run a batch experiment from a config");
    experiment->add_option("--config", config_path, "Experiment config JSON")->required();
    experiment->add_option("--out", out_dir, "Output directory")->required();
    experiment->add_option("--jobs", jobs, "Parallel jobs (default: SASP_JOBS or 1)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter across values");
    sweep_cmd->add_option("--config", config_path, "Experiment config JSON")->required();
    sweep_cmd->add_option("--param", parameter, "One of: xi, T, beta, trace")->required();
    sweep_cmd->add_option("--values", sweep_values, "Values to sweep")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--out", out_dir, "Output directory")->required();
    sweep_cmd->add_option("--jobs", jobs, "Parallel jobs (default: SASP_JOBS or 1)");

    auto* report = app.add_subcommand("report", "Re-emit report files from saved records");
    report->add_option("--records", records_path, "records.json from a previous experiment")
        ->required();
    report->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(options.instance_path, options.out_path);
        if (run->parsed()) {
            const bool advice =
                options.algorithm == "uq-advice" || options.algorithm == "ro-advice";
            if (options.algorithm != "roro" && options.algorithm != "threshold" && !advice) {
                return usage_error("unknown algorithm: " + options.algorithm);
            }
            if (advice && options.forecast_path.empty()) {
                return usage_error("--forecast is required for " + options.algorithm);
            }
            if (!(options.trust >= 0.0 && options.trust <= 1.0)) {
                return usage_error("--trust must lie in [0, 1]");
            }
            return cmd_run(options);
        }
        if (dus->parsed()) return cmd_dus(options);
        if (synth->parsed()) {
            if (!(xi >= 0.0 && xi <= 1.0)) return usage_error("--xi must lie in [0, 1]");
            return cmd_synth(options, xi);
        }
        if (experiment->parsed()) return cmd_experiment(config_path, out_dir, jobs);
        if (sweep_cmd->parsed()) {
            return cmd_sweep(config_path, parameter, sweep_values, out_dir, jobs);
        }
        if (report->parsed()) return cmd_report(records_path, out_dir);
    } catch (const sasp::solver_error& e) {
        std::cerr << "solver error: " << e.what() << " (residual " << e.residual << ")\n";
        return kExitSolver;
    } catch (const sasp::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
