#include "sasp/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sasp/rng.hpp"

namespace sasp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        // Trim surrounding whitespace and CR from Windows line endings.
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? std::string()
                                                    : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && std::isfinite(out);
}

// Minimal ISO-8601 parser: YYYY-MM-DD with optional [T ]HH:MM[:SS] and
// optional trailing 'Z'. Returns seconds since the civil epoch.
bool parse_iso8601(const std::string& text, long long& out) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    const char* s = text.c_str();
    int consumed = 0;
    if (std::sscanf(s, "%4d-%2d-%2d%n", &year, &month, &day, &consumed) != 3) return false;
    const char* rest = s + consumed;
    if (*rest == 'T' || *rest == ' ') {
        ++rest;
        if (std::sscanf(rest, "%2d:%2d%n", &hour, &minute, &consumed) != 2) return false;
        rest += consumed;
        if (*rest == ':') {
            ++rest;
            if (std::sscanf(rest, "%2d%n", &second, &consumed) != 1) return false;
            rest += consumed;
        }
    }
    if (*rest == 'Z') ++rest;
    if (*rest != '\0') return false;
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 ||
        second > 60) {
        return false;
    }
    // Days-from-civil (Howard Hinnant's algorithm).
    const int y_adj = year - (month <= 2 ? 1 : 0);
    const long long era = (y_adj >= 0 ? y_adj : y_adj - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y_adj - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const long long days = era * 146097 + static_cast<long long>(doe) - 719468;
    out = days * 86400 + hour * 3600 + minute * 60 + second;
    return true;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::string::npos;
}

[[noreturn]] void line_error(const std::string& path, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw validation_error(msg.str());
}

}  // namespace

Trace load_trace_csv(const std::string& path, const std::string& value_column, bool strict,
                     std::vector<std::size_t>* rejected_lines) {
    std::ifstream file(path);
    if (!file) throw validation_error("trace file not found: " + path);

    std::string line;
    if (!std::getline(file, line)) throw validation_error("empty trace file: " + path);
    const auto header = split_csv_line(line);
    const std::size_t ts_col = find_column(header, "timestamp");
    const std::size_t value_col = find_column(header, value_column);
    if (ts_col == std::string::npos) line_error(path, 1, "missing `timestamp` column");
    if (value_col == std::string::npos) line_error(path, 1, "missing `" + value_column + "` column");

    Trace trace;
    trace.name = path;
    long long previous_epoch = std::numeric_limits<long long>::min();
    std::size_t line_number = 1;
    while (std::getline(file, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        double value = 0.0;
        long long epoch = 0;
        const bool parsed = fields.size() > std::max(ts_col, value_col) &&
                            parse_iso8601(fields[ts_col], epoch) &&
                            parse_double(fields[value_col], value);
        if (!parsed) {
            if (strict) line_error(path, line_number, "malformed row");
            if (rejected_lines) rejected_lines->push_back(line_number);
            continue;
        }
        if (epoch <= previous_epoch) {
            line_error(path, line_number, epoch == previous_epoch
                                              ? "duplicate timestamp"
                                              : "timestamps not strictly increasing");
        }
        previous_epoch = epoch;
        trace.timestamps.push_back(fields[ts_col]);
        trace.values.push_back(value);
    }
    if (trace.values.empty()) throw validation_error("trace has no data rows: " + path);
    return trace;
}

std::pair<Trace, int> clamp_prices(const Trace& trace, double floor) {
    if (!(floor > 0.0)) {
        throw validation_error("clamp_prices: floor must be positive");
    }
    Trace clamped = trace;
    int count = 0;
    for (double& value : clamped.values) {
        if (value < floor) {
            value = floor;
            ++count;
        }
    }
    return {std::move(clamped), count};
}

std::pair<double, double> estimate_band(const Trace& trace) {
    if (trace.values.empty()) throw validation_error("estimate_band: empty trace");
    const auto [lo, hi] = std::minmax_element(trace.values.begin(), trace.values.end());
    return {*lo, *hi};
}

namespace {

Instance window_instance(const Trace& trace, std::size_t start, int horizon, double beta,
                         double lambda_reg, const std::pair<double, double>& band) {
    Instance instance;
    instance.params = ProblemParams::uniform(band.first, band.second, beta, lambda_reg, horizon);
    instance.prices.assign(trace.values.begin() + static_cast<std::ptrdiff_t>(start),
                           trace.values.begin() + static_cast<std::ptrdiff_t>(start) + horizon);
    instance.validate();
    return instance;
}

}  // namespace

std::vector<Instance> make_instances(const Trace& trace, int horizon, int stride, double beta,
                                     double lambda_reg,
                                     std::optional<std::pair<double, double>> band_override) {
    if (horizon < 1) throw validation_error("make_instances: horizon must be positive");
    if (stride < 1) throw validation_error("make_instances: stride must be positive");
    if (trace.values.size() < static_cast<std::size_t>(horizon)) {
        throw validation_error("make_instances: trace shorter than horizon");
    }
    const auto band = band_override.value_or(estimate_band(trace));
    std::vector<Instance> instances;
    for (std::size_t start = 0; start + static_cast<std::size_t>(horizon) <= trace.values.size();
         start += static_cast<std::size_t>(stride)) {
        instances.push_back(window_instance(trace, start, horizon, beta, lambda_reg, band));
    }
    return instances;
}

Instance make_window_instance(const Trace& trace, std::size_t start, int horizon, double beta,
                              double lambda_reg,
                              std::optional<std::pair<double, double>> band_override) {
    if (start + static_cast<std::size_t>(horizon) > trace.values.size()) {
        throw validation_error("make_window_instance: window exceeds trace length");
    }
    const auto band = band_override.value_or(estimate_band(trace));
    return window_instance(trace, start, horizon, beta, lambda_reg, band);
}

std::vector<std::size_t> sample_window_starts(const Trace& trace, int horizon, int count,
                                              std::uint64_t seed) {
    if (horizon < 1) throw validation_error("sample_window_starts: horizon must be positive");
    if (count < 1) throw validation_error("sample_window_starts: count must be positive");
    if (trace.values.size() < static_cast<std::size_t>(horizon)) {
        throw validation_error("sample_window_starts: trace shorter than horizon");
    }
    const auto n_starts = trace.values.size() - static_cast<std::size_t>(horizon) + 1;
    CounterRng rng(seed, /*stream=*/0x113A);
    std::vector<std::size_t> starts(static_cast<std::size_t>(count));
    for (auto& start : starts) start = static_cast<std::size_t>(rng.uniform_index(n_starts));
    return starts;
}

std::vector<Instance> sample_instances(const Trace& trace, int horizon, int count,
                                       std::uint64_t seed, double beta, double lambda_reg,
                                       std::optional<std::pair<double, double>> band_override) {
    const auto band = band_override.value_or(estimate_band(trace));
    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(count));
    for (const std::size_t start : sample_window_starts(trace, horizon, count, seed)) {
        instances.push_back(window_instance(trace, start, horizon, beta, lambda_reg, band));
    }
    return instances;
}

UqForecast synth_uq(const Instance& instance, const SynthUqConfig& config,
                    const DusConfig& dus_config) {
    instance.validate();
    if (!(config.xi >= 0.0 && config.xi <= 1.0)) {
        throw validation_error("synth_uq: xi must lie in [0, 1]");
    }
    const ProblemParams& params = instance.params;
    const auto T = instance.prices.size();
    const double width = config.xi * params.band() / 2.0;

    UqForecast forecast;
    forecast.coverage_delta = 0.0;  // the true value is covered by construction
    forecast.lower.resize(T);
    forecast.upper.resize(T);
    if (width <= 0.0) {
        forecast.lower = instance.prices;
        forecast.upper = instance.prices;
        forecast.point = instance.prices;
        return forecast;
    }

    CounterRng rng(config.seed, /*stream=*/0x5E3D);
    for (std::size_t t = 0; t < T; ++t) {
        const double lower = std::max(params.p_min, instance.prices[t] - rng.next_unit() * width);
        forecast.lower[t] = lower;
        forecast.upper[t] = std::min(lower + width, params.p_max);
    }

    // Point forecasts are set to the scenario that moves the optimal
    // decisions furthest from the truth: a worst case that degrades the
    // forecast as the uncertainty grows.
    forecast.point = instance.prices;
    const DusResult worst = dus_solve(params, forecast, dus_config);
    forecast.point = worst.worst_scenario;
    forecast.validate(params);
    return forecast;
}

ForecastSeries load_forecast_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw validation_error("forecast file not found: " + path);

    std::string line;
    if (!std::getline(file, line)) throw validation_error("empty forecast file: " + path);
    const auto header = split_csv_line(line);
    const std::size_t ts_col = find_column(header, "timestamp");
    const std::size_t point_col = find_column(header, "point");
    const std::size_t lower_col = find_column(header, "lower");
    const std::size_t upper_col = find_column(header, "upper");
    const std::size_t delta_col = find_column(header, "delta");
    if (ts_col == std::string::npos) line_error(path, 1, "missing `timestamp` column");
    if (point_col == std::string::npos) line_error(path, 1, "missing `point` column");
    if (lower_col == std::string::npos) line_error(path, 1, "missing `lower` column");
    if (upper_col == std::string::npos) line_error(path, 1, "missing `upper` column");

    ForecastSeries series;
    bool delta_set = false;
    long long previous_epoch = std::numeric_limits<long long>::min();
    std::size_t line_number = 1;
    while (std::getline(file, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::size_t needed = std::max({ts_col, point_col, lower_col, upper_col});
        if (fields.size() <= needed) line_error(path, line_number, "malformed row");
        long long epoch = 0;
        double point = 0.0, lower = 0.0, upper = 0.0;
        if (!parse_iso8601(fields[ts_col], epoch) || !parse_double(fields[point_col], point) ||
            !parse_double(fields[lower_col], lower) || !parse_double(fields[upper_col], upper)) {
            line_error(path, line_number, "malformed row");
        }
        if (epoch <= previous_epoch) {
            line_error(path, line_number, "timestamps not strictly increasing");
        }
        previous_epoch = epoch;
        if (lower > point) line_error(path, line_number, "lower bound exceeds point forecast");
        if (point > upper) line_error(path, line_number, "point forecast exceeds upper bound");
        if (!delta_set && delta_col != std::string::npos && fields.size() > delta_col) {
            double delta = 0.0;
            if (!parse_double(fields[delta_col], delta) || delta < 0.0 || delta > 1.0) {
                line_error(path, line_number, "invalid delta");
            }
            series.coverage_delta = delta;
            delta_set = true;
        }
        series.timestamps.push_back(fields[ts_col]);
        series.point.push_back(point);
        series.lower.push_back(lower);
        series.upper.push_back(upper);
    }
    if (series.point.empty()) throw validation_error("forecast has no data rows: " + path);
    return series;
}

UqForecast slice_forecast(const ForecastSeries& series, const Trace& trace, std::size_t start,
                          const ProblemParams& params) {
    const auto horizon = static_cast<std::size_t>(params.horizon);
    if (start + horizon > trace.timestamps.size()) {
        throw validation_error("slice_forecast: window exceeds trace length");
    }
    // Locate the window's first timestamp in the series.
    const auto it = std::find(series.timestamps.begin(), series.timestamps.end(),
                              trace.timestamps[start]);
    if (it == series.timestamps.end()) {
        throw validation_error("slice_forecast: no forecast for timestamp " +
                               trace.timestamps[start]);
    }
    const auto offset = static_cast<std::size_t>(it - series.timestamps.begin());
    if (offset + horizon > series.timestamps.size()) {
        throw validation_error("slice_forecast: forecast series ends inside the window");
    }

    UqForecast forecast;
    forecast.coverage_delta = series.coverage_delta;
    forecast.point.resize(horizon);
    forecast.lower.resize(horizon);
    forecast.upper.resize(horizon);
    for (std::size_t i = 0; i < horizon; ++i) {
        if (series.timestamps[offset + i] != trace.timestamps[start + i]) {
            throw validation_error("slice_forecast: timestamp mismatch at " +
                                   trace.timestamps[start + i]);
        }
        // Clip into the admissible band; clipping preserves the ordering.
        forecast.lower[i] = std::clamp(series.lower[offset + i], params.p_min, params.p_max);
        forecast.upper[i] = std::clamp(series.upper[offset + i], params.p_min, params.p_max);
        forecast.point[i] = std::clamp(series.point[offset + i], forecast.lower[i],
                                       forecast.upper[i]);
    }
    forecast.validate(params);
    return forecast;
}

Trace synthetic_trace(int length, double low, double high, std::uint64_t seed,
                      const std::string& name) {
    if (length < 1) throw validation_error("synthetic_trace: length must be positive");
    if (!(low > 0.0) || !(high >= low)) {
        throw validation_error("synthetic_trace: band must satisfy 0 < low <= high");
    }
    Trace trace;
    trace.name = name;
    trace.units = "synthetic";
    CounterRng rng(seed, /*stream=*/0x7ACE);
    trace.values.resize(static_cast<std::size_t>(length));
    trace.timestamps.resize(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
        trace.values[static_cast<std::size_t>(i)] = rng.uniform(low, high);
        // Hourly stamps starting 2022-01-01T00:00Z on a flat 28-day calendar.
        const int day = i / 24;
        const int hour = i % 24;
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:00Z", 2022 + day / 336,
                      1 + (day % 336) / 28, 1 + day % 28, hour);
        trace.timestamps[static_cast<std::size_t>(i)] = buffer;
    }
    return trace;
}

}  // namespace sasp
