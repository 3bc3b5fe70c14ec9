// Trace and forecast ingestion, instance extraction, and the synthetic
// uncertainty-quantified forecast generator.
//
// File formats:
//   trace CSV:    header `timestamp,value` (value column name configurable),
//                 UTF-8, ISO-8601 timestamps, decimal-point values
//   forecast CSV: header `timestamp,point,lower,upper` with an optional
//                 `delta` column applied globally

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sasp/dus.hpp"
#include "sasp/types.hpp"

namespace sasp {

struct Trace {
    std::string name;
    std::vector<std::string> timestamps;  // strictly increasing
    Vec values;
    std::string units;
};

struct ForecastSeries {
    std::vector<std::string> timestamps;
    Vec point;
    Vec lower;
    Vec upper;
    double coverage_delta = 0.0;
};

/// Width knob for synthetic uncertainty sets: box width = xi * (p_max - p_min) / 2.
struct SynthUqConfig {
    double xi = 0.0;  // in [0, 1]
    std::uint64_t seed = 0;
};

/// Parses a trace CSV. In strict mode (default) a malformed row raises a
/// validation_error naming the line; otherwise malformed rows are skipped and
/// their line numbers reported through `rejected_lines` when given.
Trace load_trace_csv(const std::string& path, const std::string& value_column = "value",
                     bool strict = true, std::vector<std::size_t>* rejected_lines = nullptr);

/// Replaces values below `floor` by `floor` (signals must stay positive even
/// when markets report negative prices). Returns the clamped trace and the
/// number of replaced values; the input is preserved.
std::pair<Trace, int> clamp_prices(const Trace& trace, double floor);

/// Global (min, max) of the trace values; the default admissible band.
std::pair<double, double> estimate_band(const Trace& trace);

/// Sliding windows of length `horizon` at the given stride. Every window
/// inherits the trace-level band (or `band_override` when provided).
std::vector<Instance> make_instances(const Trace& trace, int horizon, int stride, double beta,
                                     double lambda_reg,
                                     std::optional<std::pair<double, double>> band_override = {});

/// One window starting at `start` (0-based offset into the trace).
Instance make_window_instance(const Trace& trace, std::size_t start, int horizon, double beta,
                              double lambda_reg,
                              std::optional<std::pair<double, double>> band_override = {});

/// `count` uniformly sampled window start offsets (seeded, deterministic).
std::vector<std::size_t> sample_window_starts(const Trace& trace, int horizon, int count,
                                              std::uint64_t seed);

/// `count` windows at uniformly sampled start offsets (seeded, deterministic).
std::vector<Instance> sample_instances(const Trace& trace, int horizon, int count,
                                       std::uint64_t seed, double beta, double lambda_reg,
                                       std::optional<std::pair<double, double>> band_override = {});

/// Synthetic UQ forecast around an instance's true prices: per step, an
/// interval of the configured width positioned uniformly at random around the
/// true value (truncated to the band), with the point forecast set to the
/// scenario that maximizes the decision uncertainty score. The true prices
/// are covered by construction; xi = 0 reproduces them exactly.
UqForecast synth_uq(const Instance& instance, const SynthUqConfig& config,
                    const DusConfig& dus_config);

ForecastSeries load_forecast_csv(const std::string& path);

/// Cuts the forecast window matching `trace[start, start+horizon)` by exact
/// timestamp equality, clipped into the admissible band of `params`.
/// Mismatched timestamps are errors, not interpolations.
UqForecast slice_forecast(const ForecastSeries& series, const Trace& trace, std::size_t start,
                          const ProblemParams& params);

/// Hourly synthetic trace with values drawn uniformly from [low, high];
/// deterministic in the seed. Used by the experiment harness and tests.
Trace synthetic_trace(int length, double low, double high, std::uint64_t seed,
                      const std::string& name = "synthetic");

}  // namespace sasp
