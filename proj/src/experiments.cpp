#include "sasp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sasp/parallel.hpp"
#include "sasp/rng.hpp"
#include "sasp/robust.hpp"

namespace sasp {

namespace {

constexpr double kCrSlack = 1e-6;

std::string format_fixed(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

std::string sanitize_label(const std::string& label) {
    std::string out;
    for (const char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
            out.push_back(c);
        } else {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

}  // namespace

AlgorithmSpec AlgorithmSpec::parse(const std::string& name) {
    AlgorithmSpec spec;
    if (name == "opt") {
        spec.kind = Kind::Opt;
    } else if (name == "roro") {
        spec.kind = Kind::Roro;
    } else if (name == "threshold") {
        spec.kind = Kind::Threshold;
    } else if (name == "uq-advice") {
        spec.kind = Kind::UqAdvice;
    } else if (name == "ro-advice" || name.rfind("ro-advice:", 0) == 0) {
        spec.kind = Kind::RoAdvice;
        if (name == "ro-advice") {
            spec.trust = 0.5;
        } else {
            const std::string arg = name.substr(std::string("ro-advice:").size());
            if (arg == "star") {
                spec.hindsight_trust = true;
            } else {
                char* end = nullptr;
                spec.trust = std::strtod(arg.c_str(), &end);
                if (end != arg.c_str() + arg.size() || !(spec.trust >= 0.0) ||
                    spec.trust > 1.0) {
                    throw validation_error("unknown algorithm: " + name);
                }
            }
        }
    } else {
        throw validation_error("unknown algorithm: " + name);
    }
    return spec;
}

std::string AlgorithmSpec::label() const {
    switch (kind) {
        case Kind::Opt: return "opt";
        case Kind::Roro: return "roro";
        case Kind::Threshold: return "threshold";
        case Kind::UqAdvice: return "uq-advice";
        case Kind::RoAdvice: {
            if (hindsight_trust) return "ro-advice[star]";
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "ro-advice[%.2f]", trust);
            return buffer;
        }
    }
    return "unknown";
}

std::string AlgorithmSpec::canonical_name() const {
    switch (kind) {
        case Kind::Opt: return "opt";
        case Kind::Roro: return "roro";
        case Kind::Threshold: return "threshold";
        case Kind::UqAdvice: return "uq-advice";
        case Kind::RoAdvice: {
            if (hindsight_trust) return "ro-advice:star";
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "ro-advice:%.4g", trust);
            return buffer;
        }
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (horizon < 1) throw validation_error("config: horizon must be positive");
    if (n_instances < 1) throw validation_error("config: n_instances must be positive");
    if (sweep_instances < 1) throw validation_error("config: sweep_instances must be positive");
    if (algorithms.empty()) throw validation_error("config: no algorithms configured");
    if (traces.empty() && !synthetic.has_value()) {
        throw validation_error("config: either traces or a synthetic spec is required");
    }
    if (!traces.empty() && synthetic.has_value()) {
        throw validation_error("config: traces and synthetic spec are mutually exclusive");
    }
    if (xi && !(*xi >= 0.0 && *xi <= 1.0)) {
        throw validation_error("config: xi must lie in [0, 1]");
    }
    if (percentile_method != "linear_closest_ranks") {
        throw validation_error("config: unknown percentile_method " + percentile_method);
    }
    if (jobs < 1) throw validation_error("config: jobs must be positive");
    const bool advice = std::any_of(algorithms.begin(), algorithms.end(),
                                    [](const AlgorithmSpec& a) { return a.needs_forecast(); });
    if (advice && !xi) {
        const bool all_files = !traces.empty() &&
                               std::all_of(traces.begin(), traces.end(), [](const TraceSpec& t) {
                                   return !t.forecast_csv.empty();
                               });
        if (!all_files) {
            throw validation_error(
                "config: advice algorithms need xi or forecast files for every trace");
        }
    }
}

double empirical_cr(const RunRecord& run, const SolveReport& opt) {
    if (!(opt.cost.total > 0.0)) {
        throw validation_error("empirical_cr: optimal cost must be positive");
    }
    const double ratio = run.cost.total / opt.cost.total;
    // Ratios within numerical slack of 1 count as matching the optimum.
    return ratio <= 1.0 + kCrSlack ? 1.0 : ratio;
}

AggregateStats aggregate(const Vec& crs) {
    if (crs.empty()) throw validation_error("aggregate: empty sample set");
    AggregateStats stats;
    stats.sorted_crs = crs;
    std::sort(stats.sorted_crs.begin(), stats.sorted_crs.end());
    stats.count = crs.size();
    double total = 0.0;
    for (const double v : crs) total += v;
    stats.mean = total / static_cast<double>(crs.size());
    // Linear interpolation between closest ranks.
    const double rank = 0.95 * static_cast<double>(stats.count - 1);
    const auto lo = static_cast<std::size_t>(rank);
    const auto hi = std::min(lo + 1, stats.count - 1);
    stats.p95 = stats.sorted_crs[lo] + (rank - static_cast<double>(lo)) *
                                           (stats.sorted_crs[hi] - stats.sorted_crs[lo]);
    return stats;
}

namespace {

struct Prepared {
    Instance instance;
    bool has_forecast = false;
    UqForecast forecast;
    SolveReport opt;
    Vec advice;           // OPT(point forecast) decisions
    DusResult dus;        // computed when uq-advice runs
    bool truth_covered = false;
    bool failed = false;
    std::string error;
};

struct SourcedWindow {
    const Trace* trace = nullptr;
    const ForecastSeries* forecast = nullptr;
    std::size_t start = 0;
    Instance instance;
};

struct Batch {
    std::vector<Prepared> prepared;
};

Batch prepare_batch(const ExperimentConfig& config, int n_instances, bool need_advice,
                    bool need_dus) {
    config.validate();
    std::vector<SourcedWindow> windows;
    windows.reserve(static_cast<std::size_t>(n_instances));

    // Loaded traces/forecasts must outlive the preparation loop.
    std::vector<Trace> traces;
    std::vector<ForecastSeries> forecasts;
    std::vector<int> forecast_index;

    if (config.synthetic) {
        const SyntheticSpec& spec = *config.synthetic;
        traces.push_back(synthetic_trace(std::max(spec.length, config.horizon), spec.p_min,
                                         spec.p_max,
                                         CounterRng::mix(config.master_seed, 0xA11CE)));
        forecast_index.push_back(-1);
    } else {
        for (std::size_t k = 0; k < config.traces.size(); ++k) {
            const TraceSpec& spec = config.traces[k];
            Trace loaded = load_trace_csv(spec.trace_csv, spec.value_column);
            loaded.name = spec.name.empty() ? spec.trace_csv : spec.name;
            auto [clamped, clamp_count] = clamp_prices(loaded, spec.clamp_floor);
            (void)clamp_count;
            traces.push_back(std::move(clamped));
            if (!spec.forecast_csv.empty()) {
                forecasts.push_back(load_forecast_csv(spec.forecast_csv));
                forecast_index.push_back(static_cast<int>(forecasts.size()) - 1);
            } else {
                forecast_index.push_back(-1);
            }
        }
    }

    // Synthetic sources carry their nominal band; trace bands are estimated
    // from the (clamped) data.
    std::optional<std::pair<double, double>> band_override;
    if (config.synthetic) {
        band_override = {config.synthetic->p_min, config.synthetic->p_max};
    }

    // Distribute the instance budget across sources, remainder to the front.
    const auto n_sources = traces.size();
    for (std::size_t k = 0; k < n_sources; ++k) {
        int quota = n_instances / static_cast<int>(n_sources);
        if (k < static_cast<std::size_t>(n_instances % static_cast<int>(n_sources))) ++quota;
        if (quota == 0) continue;
        const auto starts =
            sample_window_starts(traces[k], config.horizon, quota,
                                 CounterRng::mix(config.master_seed, 0x57A7 + k));
        for (const std::size_t start : starts) {
            SourcedWindow window;
            window.trace = &traces[k];
            window.forecast =
                forecast_index[k] >= 0 ? &forecasts[static_cast<std::size_t>(forecast_index[k])]
                                       : nullptr;
            window.start = start;
            window.instance = make_window_instance(traces[k], start, config.horizon, config.beta,
                                                   config.lambda_reg, band_override);
            windows.push_back(std::move(window));
        }
    }

    Batch batch;
    batch.prepared.resize(windows.size());
    parallel_for_index(windows.size(), config.jobs, [&](std::size_t i) {
        Prepared& prep = batch.prepared[i];
        try {
            prep.instance = windows[i].instance;
            prep.opt = opt_deterministic_tiebreak(prep.instance.params, prep.instance.prices);

            if (windows[i].forecast != nullptr) {
                prep.forecast = slice_forecast(*windows[i].forecast, *windows[i].trace,
                                               windows[i].start, prep.instance.params);
                prep.has_forecast = true;
            } else if (config.xi) {
                SynthUqConfig synth;
                synth.xi = *config.xi;
                synth.seed = CounterRng::mix(config.master_seed, 0x1000 + i);
                DusConfig dus_config = config.dus;
                dus_config.seed = CounterRng::mix(config.master_seed, 0x2000 + i);
                dus_config.jobs = 1;  // parallelism lives at the instance level
                prep.forecast = synth_uq(prep.instance, synth, dus_config);
                prep.has_forecast = true;
            }

            if (prep.has_forecast) {
                prep.truth_covered = true;
                for (std::size_t t = 0; t < prep.instance.prices.size(); ++t) {
                    if (prep.instance.prices[t] < prep.forecast.lower[t] - 1e-12 ||
                        prep.instance.prices[t] > prep.forecast.upper[t] + 1e-12) {
                        prep.truth_covered = false;
                        break;
                    }
                }
                if (need_advice) {
                    prep.advice = opt_deterministic_tiebreak(prep.instance.params,
                                                             prep.forecast.point)
                                      .schedule.decisions;
                }
                if (need_dus) {
                    DusConfig dus_config = config.dus;
                    dus_config.seed = CounterRng::mix(config.master_seed, 0x3000 + i);
                    dus_config.jobs = 1;
                    prep.dus = dus_solve(prep.instance.params, prep.forecast, dus_config);
                }
            }
        } catch (const std::exception& e) {
            prep.failed = true;
            prep.error = e.what();
        }
    });
    return batch;
}

RunRecord run_algorithm(const AlgorithmSpec& spec, const Prepared& prep, double trust_star,
                        const ExperimentConfig& config) {
    switch (spec.kind) {
        case AlgorithmSpec::Kind::Opt: {
            RunRecord record;
            record.algorithm_name = "opt";
            record.schedule = prep.opt.schedule;
            record.cost = prep.opt.cost;
            record.final_utilization_pre_compulsory = 1.0;
            return record;
        }
        case AlgorithmSpec::Kind::Roro:
            return roro_run(prep.instance);
        case AlgorithmSpec::Kind::Threshold:
            return threshold_run(prep.instance);
        case AlgorithmSpec::Kind::UqAdvice:
            return uq_advice_run_prepared(prep.instance, prep.advice, prep.dus,
                                          config.dus.inflation);
        case AlgorithmSpec::Kind::RoAdvice:
            return ro_advice_run_prepared(prep.instance, prep.advice,
                                          spec.hindsight_trust ? trust_star : spec.trust);
    }
    throw validation_error("run_algorithm: unhandled algorithm kind");
}

// Theoretical-bound post-checks for one record; returns the violation count.
int check_bounds(const AlgorithmSpec& spec, const Prepared& prep, const RunRecord& record) {
    int violations = 0;
    const double raw = record.cost.total / prep.opt.cost.total;
    if (raw < 1.0 - kCrSlack) ++violations;  // nothing beats the offline optimum

    const ProblemParams& params = prep.instance.params;
    if (spec.kind == AlgorithmSpec::Kind::Roro) {
        if (raw > roro_worst_case_bound(params) + kCrSlack) ++violations;
    } else if (spec.kind == AlgorithmSpec::Kind::UqAdvice && record.dus_used) {
        // The mixing bounds only need a valid ratio guarantee for the robust
        // component; use the unconditional one.
        const double alpha = roro_worst_case_bound(params);
        const double zeta = bound_with_dus_guard(
            [&](double d) { return robustness_bound(params, alpha, d); }, *record.dus_used);
        if (raw > zeta + kCrSlack) ++violations;
        if (prep.truth_covered) {
            const double theta = bound_with_dus_guard(
                [&](double d) { return uq_robustness_bound(params, alpha, d); },
                *record.dus_used);
            if (raw > theta + kCrSlack) ++violations;
        }
    }
    return violations;
}

double mean_ro_advice_cr(const Batch& batch, double trust, int jobs) {
    const auto n = batch.prepared.size();
    Vec crs(n, -1.0);
    parallel_for_index(n, jobs, [&](std::size_t i) {
        const Prepared& prep = batch.prepared[i];
        if (prep.failed || !prep.has_forecast) return;
        const RunRecord record = ro_advice_run_prepared(prep.instance, prep.advice, trust);
        crs[i] = std::max(1.0, record.cost.total / prep.opt.cost.total);
    });
    double total = 0.0;
    std::size_t count = 0;
    for (const double v : crs) {
        if (v >= 0.0) {
            total += v;
            ++count;
        }
    }
    if (count == 0) throw validation_error("trust search: no evaluable instances");
    return total / static_cast<double>(count);
}

double search_trust_star(const Batch& batch, double grid_step, int jobs) {
    if (!(grid_step > 0.0 && grid_step <= 1.0)) {
        throw validation_error("trust search: grid_step must lie in (0, 1]");
    }
    Vec grid;
    for (double rho = 0.0; rho < 1.0 - grid_step / 2.0; rho += grid_step) grid.push_back(rho);
    grid.push_back(1.0);

    double best_rho = 0.0;
    double best_cr = std::numeric_limits<double>::infinity();
    for (const double rho : grid) {
        const double cr = mean_ro_advice_cr(batch, rho, jobs);
        if (cr < best_cr - 1e-12) {  // ties toward the smaller rho
            best_cr = cr;
            best_rho = rho;
        }
    }
    return best_rho;
}

}  // namespace

double lambda_star_search(const ExperimentConfig& config, double grid_step) {
    config.validate();
    const Batch batch = prepare_batch(config, config.n_instances, /*need_advice=*/true,
                                      /*need_dus=*/false);
    return search_trust_star(batch, grid_step, config.jobs);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const bool need_advice = std::any_of(config.algorithms.begin(), config.algorithms.end(),
                                         [](const AlgorithmSpec& a) { return a.needs_forecast(); });
    const bool need_dus =
        std::any_of(config.algorithms.begin(), config.algorithms.end(), [](const AlgorithmSpec& a) {
            return a.kind == AlgorithmSpec::Kind::UqAdvice;
        });
    const bool need_star =
        std::any_of(config.algorithms.begin(), config.algorithms.end(),
                    [](const AlgorithmSpec& a) { return a.hindsight_trust; });

    const Batch batch = prepare_batch(config, config.n_instances, need_advice, need_dus);

    ExperimentResult result;
    result.config = config;
    if (need_star) {
        result.trust_star = search_trust_star(batch, 0.05, config.jobs);
    }

    const auto n = batch.prepared.size();
    const auto n_algorithms = config.algorithms.size();
    std::vector<int> violation_counts(n, 0);
    std::vector<std::string> errors(n);
    std::vector<std::vector<RunRecord>> records(n_algorithms, std::vector<RunRecord>(n));
    std::vector<std::vector<char>> valid(n_algorithms, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n_algorithms; ++a) {
        const AlgorithmSpec& spec = config.algorithms[a];
        result.algorithms.push_back(spec.label());
        parallel_for_index(n, config.jobs, [&](std::size_t i) {
            const Prepared& prep = batch.prepared[i];
            if (prep.failed) {
                errors[i] = prep.error;
                return;
            }
            try {
                RunRecord record =
                    run_algorithm(spec, prep, result.trust_star.value_or(0.5), config);
                record.empirical_cr = empirical_cr(record, prep.opt);
                violation_counts[i] += check_bounds(spec, prep, record);
                records[a][i] = std::move(record);
                valid[a][i] = 1;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
    }

    // An instance enters the aggregates only when every algorithm succeeded
    // on it, so all algorithms share the same denominator.
    std::size_t failures = 0;
    std::vector<char> instance_ok(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < n_algorithms; ++a) instance_ok[i] &= valid[a][i];
        if (!instance_ok[i]) {
            ++failures;
            if (result.failure_messages.size() < 10) {
                result.failure_messages.push_back(
                    "instance " + std::to_string(i) + ": " +
                    (batch.prepared[i].failed ? batch.prepared[i].error : errors[i]));
            }
        }
        result.bound_violations += static_cast<std::size_t>(violation_counts[i]);
    }
    result.failures = failures;
    result.instances_evaluated = n - failures;

    for (std::size_t a = 0; a < n_algorithms; ++a) {
        std::vector<RunRecord> kept;
        Vec crs;
        kept.reserve(n);
        crs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!instance_ok[i]) continue;
            crs.push_back(records[a][i].empirical_cr.value_or(1.0));
            kept.push_back(std::move(records[a][i]));
        }
        result.records.push_back(std::move(kept));
        result.stats.push_back(crs.empty() ? AggregateStats{} : aggregate(crs));
    }
    return result;
}

ExperimentResult sweep(const ExperimentConfig& config, const std::string& parameter,
                       const std::vector<std::string>& values) {
    config.validate();
    if (parameter != "xi" && parameter != "T" && parameter != "beta" && parameter != "trace") {
        throw validation_error("sweep: parameter must be one of xi, T, beta, trace");
    }
    ExperimentResult result;
    result.config = config;
    result.sweep_parameter = parameter;
    for (const AlgorithmSpec& spec : config.algorithms) {
        result.algorithms.push_back(spec.label());
    }

    for (const std::string& value : values) {
        ExperimentConfig sub = config;
        sub.n_instances = config.sweep_instances;
        try {
            if (parameter == "xi") {
                char* end = nullptr;
                const double xi = std::strtod(value.c_str(), &end);
                if (end != value.c_str() + value.size() || !(xi >= 0.0 && xi <= 1.0)) {
                    throw validation_error("xi value outside [0, 1]");
                }
                sub.xi = xi;
            } else if (parameter == "T") {
                const int horizon = std::stoi(value);
                if (horizon < 1) throw validation_error("horizon must be positive");
                sub.horizon = horizon;
            } else if (parameter == "beta") {
                char* end = nullptr;
                const double beta = std::strtod(value.c_str(), &end);
                if (end != value.c_str() + value.size() || !(beta >= 0.0)) {
                    throw validation_error("beta must be non-negative");
                }
                sub.beta = beta;
            } else {  // trace
                auto it = std::find_if(sub.traces.begin(), sub.traces.end(),
                                       [&](const TraceSpec& t) { return t.name == value; });
                if (it == sub.traces.end()) {
                    throw validation_error("no configured trace named " + value);
                }
                const TraceSpec kept = *it;
                sub.traces = {kept};
            }
            const ExperimentResult sub_result = run_experiment(sub);
            for (std::size_t a = 0; a < sub_result.algorithms.size(); ++a) {
                SweepRow row;
                row.param_value = value;
                row.algorithm = sub_result.algorithms[a];
                row.mean_cr = sub_result.stats[a].mean;
                row.count = sub_result.stats[a].count;
                result.sweep_rows.push_back(row);
            }
            result.instances_evaluated += sub_result.instances_evaluated;
            result.failures += sub_result.failures;
            result.bound_violations += sub_result.bound_violations;
        } catch (const validation_error& e) {
            result.skipped_values.push_back(value + ": " + e.what());
        }
    }
    return result;
}

void emit_report(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw validation_error("emit_report: cannot create directory " + out_dir);

    std::vector<std::string> files;
    const auto open_file = [&](const std::string& name) {
        std::ofstream file(fs::path(out_dir) / name);
        if (!file) throw validation_error("emit_report: cannot write " + name);
        files.push_back(name);
        return file;
    };

    if (!result.stats.empty()) {
        auto summary = open_file("summary.csv");
        summary << "algorithm,mean,p95,count\n";
        for (std::size_t a = 0; a < result.algorithms.size(); ++a) {
            summary << result.algorithms[a] << "," << format_fixed(result.stats[a].mean) << ","
                    << format_fixed(result.stats[a].p95) << "," << result.stats[a].count << "\n";
        }
        for (std::size_t a = 0; a < result.algorithms.size(); ++a) {
            auto cdf = open_file("cdf_" + sanitize_label(result.algorithms[a]) + ".csv");
            cdf << "value,cumulative_fraction\n";
            const Vec& sorted = result.stats[a].sorted_crs;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                cdf << format_fixed(sorted[i]) << ","
                    << format_fixed(static_cast<double>(i + 1) /
                                    static_cast<double>(sorted.size()))
                    << "\n";
            }
        }
    }

    if (!result.sweep_rows.empty()) {
        auto sweep_file = open_file("sweep_" + sanitize_label(result.sweep_parameter) + ".csv");
        sweep_file << "param_value,algorithm,mean_cr\n";
        for (const SweepRow& row : result.sweep_rows) {
            sweep_file << row.param_value << "," << row.algorithm << ","
                       << format_fixed(row.mean_cr) << "\n";
        }
    }

    Json manifest{{"schema_version", kSchemaVersion},
                  {"config", config_to_json(result.config)},
                  {"algorithms", result.algorithms},
                  {"instances_evaluated", result.instances_evaluated},
                  {"failures", result.failures},
                  {"failure_messages", result.failure_messages},
                  {"bound_violations", result.bound_violations}};
    if (result.trust_star) manifest["trust_star"] = *result.trust_star;
    if (!result.sweep_parameter.empty()) {
        manifest["sweep"] = Json{{"parameter", result.sweep_parameter},
                                 {"skipped_values", result.skipped_values}};
    }
    files.push_back("manifest.json");
    manifest["files"] = files;
    save_json_file((fs::path(out_dir) / "manifest.json").string(), manifest);
}

ExperimentConfig config_from_json(const Json& json) {
    try {
        ExperimentConfig config;
        if (json.contains("schema_version") &&
            json.at("schema_version").get<int>() != kSchemaVersion) {
            throw validation_error("config: unsupported schema_version");
        }
        if (json.contains("synthetic")) {
            SyntheticSpec spec;
            const Json& s = json.at("synthetic");
            spec.length = s.value("length", spec.length);
            spec.p_min = s.value("p_min", spec.p_min);
            spec.p_max = s.value("p_max", spec.p_max);
            config.synthetic = spec;
        }
        if (json.contains("traces")) {
            for (const Json& t : json.at("traces")) {
                TraceSpec spec;
                spec.trace_csv = t.at("trace_csv").get<std::string>();
                spec.name = t.value("name", spec.trace_csv);
                spec.forecast_csv = t.value("forecast_csv", std::string());
                spec.value_column = t.value("value_column", std::string("value"));
                spec.clamp_floor = t.value("clamp_floor", 1.0);
                config.traces.push_back(spec);
            }
        }
        config.horizon = json.value("horizon", config.horizon);
        config.beta = json.value("beta", config.beta);
        config.lambda_reg = json.value("lambda_reg", config.lambda_reg);
        config.n_instances = json.value("n_instances", config.n_instances);
        config.sweep_instances = json.value("sweep_instances", config.sweep_instances);
        if (json.contains("xi")) config.xi = json.at("xi").get<double>();
        for (const Json& name : json.value("algorithms", Json::array())) {
            config.algorithms.push_back(AlgorithmSpec::parse(name.get<std::string>()));
        }
        config.master_seed = json.value("master_seed", config.master_seed);
        config.percentile_method = json.value("percentile_method", config.percentile_method);
        if (json.contains("dus")) {
            const Json& d = json.at("dus");
            config.dus.eval_budget = d.value("eval_budget", config.dus.eval_budget);
            config.dus.n_starts = d.value("n_starts", config.dus.n_starts);
            config.dus.refine_iters = d.value("refine_iters", config.dus.refine_iters);
            config.dus.epsilon = d.value("epsilon", config.dus.epsilon);
            config.dus.inflation = d.value("inflation", config.dus.inflation);
        }
        config.jobs = json.value("jobs", config.jobs);
        config.validate();
        return config;
    } catch (const Json::exception& e) {
        throw validation_error(std::string("config: ") + e.what());
    }
}

Json config_to_json(const ExperimentConfig& config) {
    Json json{{"schema_version", kSchemaVersion}};
    if (config.synthetic) {
        json["synthetic"] = Json{{"length", config.synthetic->length},
                                 {"p_min", config.synthetic->p_min},
                                 {"p_max", config.synthetic->p_max}};
    }
    if (!config.traces.empty()) {
        Json traces = Json::array();
        for (const TraceSpec& spec : config.traces) {
            traces.push_back(Json{{"name", spec.name},
                                  {"trace_csv", spec.trace_csv},
                                  {"forecast_csv", spec.forecast_csv},
                                  {"value_column", spec.value_column},
                                  {"clamp_floor", spec.clamp_floor}});
        }
        json["traces"] = traces;
    }
    json["horizon"] = config.horizon;
    json["beta"] = config.beta;
    json["lambda_reg"] = config.lambda_reg;
    json["n_instances"] = config.n_instances;
    json["sweep_instances"] = config.sweep_instances;
    if (config.xi) json["xi"] = *config.xi;
    Json algorithms = Json::array();
    for (const AlgorithmSpec& spec : config.algorithms) {
        algorithms.push_back(spec.canonical_name());
    }
    json["algorithms"] = algorithms;
    json["master_seed"] = config.master_seed;
    json["percentile_method"] = config.percentile_method;
    json["dus"] = Json{{"eval_budget", config.dus.eval_budget},
                       {"n_starts", config.dus.n_starts},
                       {"refine_iters", config.dus.refine_iters},
                       {"epsilon", config.dus.epsilon},
                       {"inflation", config.dus.inflation}};
    json["jobs"] = config.jobs;
    return json;
}

}  // namespace sasp
