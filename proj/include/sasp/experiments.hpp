// Trace-driven evaluation harness: batch runs over sampled instances,
// empirical competitive ratios against the offline optimum, aggregate
// statistics, the hindsight trust search, parameter sweeps, and plot-ready
// CSV emission.
//
// Instances are evaluated in parallel with per-instance seed substreams and
// results stored by instance index, so the emitted files are byte-identical
// for any jobs count and replay exactly under the same config and seed.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sasp/data.hpp"
#include "sasp/dus.hpp"
#include "sasp/json_io.hpp"
#include "sasp/offline.hpp"
#include "sasp/online.hpp"

namespace sasp {

struct AlgorithmSpec {
    enum class Kind { Opt, Roro, UqAdvice, RoAdvice, Threshold };
    Kind kind = Kind::Roro;
    double trust = 0.5;           // fixed advice weight (RoAdvice)
    bool hindsight_trust = false; // RoAdvice with the best weight in hindsight

    /// Parses "opt", "roro", "threshold", "uq-advice", "ro-advice[:TRUST]",
    /// or "ro-advice:star". Throws validation_error on unknown names.
    static AlgorithmSpec parse(const std::string& name);

    bool needs_forecast() const { return kind == Kind::UqAdvice || kind == Kind::RoAdvice; }
    std::string label() const;
    /// Round-trippable form accepted by parse().
    std::string canonical_name() const;
};

struct SyntheticSpec {
    int length = 2048;     // synthetic trace length (hourly steps)
    double p_min = 100.0;
    double p_max = 400.0;
};

struct TraceSpec {
    std::string name;
    std::string trace_csv;
    std::string forecast_csv;  // empty: synthesize forecasts from xi
    std::string value_column = "value";
    double clamp_floor = 1.0;  // values below are clamped before band estimation
};

struct ExperimentConfig {
    std::vector<TraceSpec> traces;          // either traces or synthetic
    std::optional<SyntheticSpec> synthetic;
    int horizon = 8;
    double beta = 20.0;
    double lambda_reg = 0.0;
    int n_instances = 1000;
    int sweep_instances = 200;              // per sweep value
    std::optional<double> xi;               // synthetic UQ width knob
    std::vector<AlgorithmSpec> algorithms;
    std::uint64_t master_seed = 1;
    std::string percentile_method = "linear_closest_ranks";
    DusConfig dus;
    int jobs = 1;

    void validate() const;
};

struct AggregateStats {
    double mean = 0.0;
    double p95 = 0.0;
    std::size_t count = 0;
    Vec sorted_crs;  // ascending; the per-algorithm CDF sample set
};

struct SweepRow {
    std::string param_value;
    std::string algorithm;
    double mean_cr = 0.0;
    std::size_t count = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<std::string> algorithms;           // labels, config order
    std::vector<std::vector<RunRecord>> records;   // [algorithm][instance]
    std::vector<AggregateStats> stats;             // per algorithm
    std::size_t instances_evaluated = 0;
    std::size_t failures = 0;                      // excluded instances
    std::vector<std::string> failure_messages;
    std::size_t bound_violations = 0;              // theoretical-bound post-checks
    std::optional<double> trust_star;
    std::string sweep_parameter;                   // set by sweep()
    std::vector<SweepRow> sweep_rows;
    std::vector<std::string> skipped_values;       // inadmissible sweep values
};

/// Cost(run) / Cost(opt), clamped at 1 to absorb numerical slack.
/// Throws validation_error when the optimal cost is not positive.
double empirical_cr(const RunRecord& run, const SolveReport& opt);

/// Mean and 95th percentile by linear interpolation between closest ranks.
AggregateStats aggregate(const Vec& crs);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Grid search for the RO-Advice trust weight minimizing the mean empirical
/// competitive ratio over the configured instances; ties toward smaller rho.
double lambda_star_search(const ExperimentConfig& config, double grid_step = 0.05);

/// Runs `sweep_instances`-sized experiments for each value of the swept
/// parameter (one of "xi", "T", "beta", "trace"); inadmissible values are
/// reported in skipped_values rather than failing the sweep.
ExperimentResult sweep(const ExperimentConfig& config, const std::string& parameter,
                       const std::vector<std::string>& values);

/// Writes summary.csv, one cdf_<algorithm>.csv per algorithm,
/// sweep_<param>.csv when sweep rows are present, and manifest.json.
/// All floats are serialized with 6 decimal places.
void emit_report(const ExperimentResult& result, const std::string& out_dir);

ExperimentConfig config_from_json(const Json& json);
Json config_to_json(const ExperimentConfig& config);

}  // namespace sasp
