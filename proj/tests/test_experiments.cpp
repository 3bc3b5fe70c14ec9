#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sasp/experiments.hpp"
#include "sasp/rng.hpp"

using namespace sasp;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

ExperimentConfig small_config(std::uint64_t seed, int n_instances = 12) {
    ExperimentConfig config;
    config.synthetic = SyntheticSpec{512, 100.0, 400.0};
    config.horizon = 6;
    config.beta = 20.0;
    config.n_instances = n_instances;
    config.sweep_instances = 6;
    config.xi = 0.4;
    config.master_seed = seed;
    config.dus.eval_budget = 60;
    config.dus.n_starts = 8;
    for (const char* name : {"roro", "threshold", "uq-advice", "ro-advice:0.5"}) {
        config.algorithms.push_back(AlgorithmSpec::parse(name));
    }
    return config;
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("empirical ratio arithmetic and slack rule") {
    RunRecord run;
    SolveReport opt;
    opt.cost.total = 200.0;
    run.cost.total = 210.0;
    CHECK(empirical_cr(run, opt) == doctest::Approx(1.05));
    run.cost.total = 200.0;
    CHECK(empirical_cr(run, opt) == 1.0);
    run.cost.total = 200.0 * 1.0000001;
    CHECK(empirical_cr(run, opt) == 1.0);
    opt.cost.total = 0.0;
    CHECK_THROWS_AS(empirical_cr(run, opt), validation_error);
}

TEST_CASE("aggregate follows the closest-ranks interpolation") {
    const AggregateStats stats = aggregate({1.0, 1.1, 1.3});
    CHECK(stats.mean == doctest::Approx(1.13333333333));
    CHECK(stats.p95 == doctest::Approx(1.28));  // index 0.95*2 = 1.9 -> 1.1 + 0.9*0.2
    CHECK(stats.count == 3);

    const AggregateStats single = aggregate({1.0});
    CHECK(single.mean == 1.0);
    CHECK(single.p95 == 1.0);

    const Vec identical(1000, 1.25);
    const AggregateStats flat = aggregate(identical);
    CHECK(flat.mean == doctest::Approx(1.25));
    CHECK(flat.p95 == doctest::Approx(1.25));

    CHECK_THROWS_AS(aggregate({}), validation_error);
}

TEST_CASE("aggregates are permutation invariant") {
    CounterRng rng(701);
    Vec crs;
    for (int i = 0; i < 50; ++i) crs.push_back(1.0 + rng.next_unit());
    const AggregateStats base = aggregate(crs);
    for (std::size_t i = crs.size() - 1; i > 0; --i) std::swap(crs[i], crs[rng.uniform_index(i + 1)]);
    const AggregateStats shuffled = aggregate(crs);
    CHECK(base.mean == doctest::Approx(shuffled.mean).epsilon(1e-12));
    CHECK(base.p95 == shuffled.p95);
}

TEST_CASE("algorithm spec parsing") {
    CHECK(AlgorithmSpec::parse("roro").kind == AlgorithmSpec::Kind::Roro);
    CHECK(AlgorithmSpec::parse("ro-advice:0.25").trust == doctest::Approx(0.25));
    CHECK(AlgorithmSpec::parse("ro-advice:star").hindsight_trust);
    CHECK(AlgorithmSpec::parse("ro-advice").trust == doctest::Approx(0.5));
    CHECK(AlgorithmSpec::parse("uq-advice").needs_forecast());
    CHECK_THROWS_AS(AlgorithmSpec::parse("magic"), validation_error);
    CHECK_THROWS_AS(AlgorithmSpec::parse("ro-advice:1.5"), validation_error);
    const auto spec = AlgorithmSpec::parse("ro-advice:0.25");
    CHECK(AlgorithmSpec::parse(spec.canonical_name()).trust == doctest::Approx(0.25));
}

TEST_CASE("small experiment produces records and stats per algorithm") {
    ExperimentConfig config = small_config(21, 2);
    config.algorithms = {AlgorithmSpec::parse("roro")};
    const ExperimentResult result = run_experiment(config);
    REQUIRE(result.algorithms.size() == 1);
    CHECK(result.records[0].size() == 2);
    CHECK(result.stats[0].count == 2);
    CHECK(result.stats[0].mean >= 1.0);
    CHECK(result.failures == 0);
    CHECK(result.bound_violations == 0);
}

TEST_CASE("exact synthetic forecasts give unit ratios") {
    ExperimentConfig config = small_config(23, 8);
    config.xi = 0.0;
    config.algorithms = {AlgorithmSpec::parse("uq-advice")};
    const ExperimentResult result = run_experiment(config);
    CHECK(result.stats[0].mean == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("experiment post-checks hold and the report replays byte-identically") {
    const ExperimentConfig config = small_config(29);
    const ExperimentResult result = run_experiment(config);
    CHECK(result.bound_violations == 0);
    CHECK(result.instances_evaluated == 12);

    const auto dir_a = fresh_dir("sasp_report_a");
    const auto dir_b = fresh_dir("sasp_report_b");
    emit_report(result, dir_a.string());
    const ExperimentResult replay = run_experiment(config);
    emit_report(replay, dir_b.string());

    for (const char* name : {"summary.csv", "manifest.json", "cdf_roro.csv",
                             "cdf_uq-advice.csv", "cdf_ro-advice_0.50.csv"}) {
        CAPTURE(name);
        const std::string a = read_file(dir_a / name);
        const std::string b = read_file(dir_b / name);
        CHECK(!a.empty());
        CHECK(a == b);
    }
}

TEST_CASE("cdf files are sorted and end at one") {
    const ExperimentConfig config = small_config(31, 8);
    const ExperimentResult result = run_experiment(config);
    const auto dir = fresh_dir("sasp_report_cdf");
    emit_report(result, dir.string());

    std::ifstream file(dir / "cdf_roro.csv");
    std::string line;
    std::getline(file, line);
    CHECK(line == "value,cumulative_fraction");
    double prev_value = 0.0;
    double last_fraction = 0.0;
    while (std::getline(file, line)) {
        const auto comma = line.find(',');
        const double value = std::stod(line.substr(0, comma));
        last_fraction = std::stod(line.substr(comma + 1));
        CHECK(value >= prev_value);
        prev_value = value;
    }
    CHECK(last_fraction == doctest::Approx(1.0));
}

TEST_CASE("summary lists algorithms in config order") {
    const ExperimentConfig config = small_config(37, 6);
    const ExperimentResult result = run_experiment(config);
    const auto dir = fresh_dir("sasp_report_summary");
    emit_report(result, dir.string());
    std::ifstream file(dir / "summary.csv");
    std::string line;
    std::getline(file, line);
    CHECK(line == "algorithm,mean,p95,count");
    std::getline(file, line);
    CHECK(line.rfind("roro,", 0) == 0);
    std::getline(file, line);
    CHECK(line.rfind("threshold,", 0) == 0);
}

TEST_CASE("hindsight trust search finds the extremes") {
    // Perfect forecasts: following the advice exactly is optimal.
    ExperimentConfig config = small_config(41, 10);
    config.xi = 0.0;
    config.algorithms = {AlgorithmSpec::parse("ro-advice:star")};
    CHECK(lambda_star_search(config) == doctest::Approx(1.0));

    const ExperimentResult result = run_experiment(config);
    CHECK(result.trust_star.has_value());
    CHECK(*result.trust_star == doctest::Approx(1.0));

    // Constant prices: every trust value ties at ratio 1; ties break low.
    ExperimentConfig flat = config;
    flat.synthetic = SyntheticSpec{256, 200.0, 200.0};
    flat.beta = 0.0;
    flat.xi = 0.0;
    CHECK(lambda_star_search(flat) == doctest::Approx(0.0));

    // Fully degraded synthetic forecasts: trusting the advice only hurts.
    ExperimentConfig adversarial = small_config(53, 10);
    adversarial.xi = 1.0;
    adversarial.algorithms = {AlgorithmSpec::parse("ro-advice:star")};
    CHECK(lambda_star_search(adversarial) == doctest::Approx(0.0));
}

TEST_CASE("the manifest's embedded config replays the summary byte-for-byte") {
    const ExperimentConfig config = small_config(59, 8);
    const auto dir_a = fresh_dir("sasp_manifest_replay_a");
    const auto dir_b = fresh_dir("sasp_manifest_replay_b");
    emit_report(run_experiment(config), dir_a.string());

    const Json manifest = load_json_file((dir_a / "manifest.json").string());
    const ExperimentConfig replayed = config_from_json(manifest.at("config"));
    emit_report(run_experiment(replayed), dir_b.string());
    CHECK(read_file(dir_a / "summary.csv") == read_file(dir_b / "summary.csv"));
}

TEST_CASE("sweeps cover admissible values and skip the rest") {
    ExperimentConfig config = small_config(43, 6);
    config.algorithms = {AlgorithmSpec::parse("roro"), AlgorithmSpec::parse("uq-advice")};

    const ExperimentResult xi_sweep = sweep(config, "xi", {"0", "0.5", "2.0"});
    CHECK(xi_sweep.sweep_rows.size() == 2 * 2);  // two admissible values x two algorithms
    CHECK(xi_sweep.skipped_values.size() == 1);
    const auto uq_at_zero =
        std::find_if(xi_sweep.sweep_rows.begin(), xi_sweep.sweep_rows.end(),
                     [](const SweepRow& row) {
                         return row.param_value == "0" && row.algorithm == "uq-advice";
                     });
    REQUIRE(uq_at_zero != xi_sweep.sweep_rows.end());
    CHECK(uq_at_zero->mean_cr == doctest::Approx(1.0).epsilon(1e-6));

    const ExperimentResult t_sweep = sweep(config, "T", {"2", "4"});
    CHECK(t_sweep.sweep_rows.size() == 4);
    for (const SweepRow& row : t_sweep.sweep_rows) CHECK(row.count == 6);

    // The switching weight is admissible strictly below half the band.
    const ExperimentResult beta_sweep = sweep(config, "beta", {"149.9", "150.0"});
    CHECK(beta_sweep.sweep_rows.size() == 2);
    REQUIRE(beta_sweep.skipped_values.size() == 1);
    CHECK(beta_sweep.skipped_values[0].rfind("150", 0) == 0);

    CHECK_THROWS_AS(sweep(config, "gamma", {"1"}), validation_error);

    const auto dir = fresh_dir("sasp_report_sweep");
    emit_report(xi_sweep, dir.string());
    CHECK(std::filesystem::exists(dir / "sweep_xi.csv"));
}

TEST_CASE("trace sources with forecast files flow through the harness") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto trace_path = dir / "sasp_harness_trace.csv";
    const auto forecast_path = dir / "sasp_harness_forecast.csv";
    {
        std::ofstream trace(trace_path);
        trace << "timestamp,value\n";
        std::ofstream forecast(forecast_path);
        forecast << "timestamp,point,lower,upper\n";
        CounterRng rng(881);
        for (int i = 0; i < 64; ++i) {
            char ts[32];
            std::snprintf(ts, sizeof(ts), "2022-07-%02dT%02d:00Z", 2 + i / 24, i % 24);
            const double value = rng.uniform(120.0, 380.0);
            const double point = std::clamp(value + rng.uniform(-25.0, 25.0), 100.0, 400.0);
            const double lo = std::max(100.0, point - rng.uniform(10.0, 40.0));
            const double hi = std::min(400.0, point + rng.uniform(10.0, 40.0));
            trace << ts << "," << value << "\n";
            forecast << ts << "," << std::clamp(point, lo, hi) << "," << lo << "," << hi << "\n";
        }
    }
    ExperimentConfig config;
    TraceSpec spec;
    spec.name = "toy";
    spec.trace_csv = trace_path.string();
    spec.forecast_csv = forecast_path.string();
    config.traces = {spec};
    config.horizon = 6;
    config.n_instances = 8;
    config.master_seed = 3;
    config.dus.eval_budget = 60;
    config.dus.n_starts = 8;
    for (const char* name : {"roro", "uq-advice", "ro-advice:star"}) {
        config.algorithms.push_back(AlgorithmSpec::parse(name));
    }
    const ExperimentResult result = run_experiment(config);
    CHECK(result.failures == 0);
    CHECK(result.bound_violations == 0);
    CHECK(result.trust_star.has_value());
    for (const AggregateStats& stats : result.stats) {
        CHECK(stats.count == 8);
        CHECK(stats.mean >= 1.0);
    }
    const ExperimentResult trace_sweep = sweep(config, "trace", {"toy", "missing"});
    CHECK(trace_sweep.sweep_rows.size() == 3);
    CHECK(trace_sweep.skipped_values.size() == 1);
}

TEST_CASE("config json round trip and validation") {
    const ExperimentConfig config = small_config(47);
    const ExperimentConfig reloaded = config_from_json(config_to_json(config));
    CHECK(reloaded.horizon == config.horizon);
    CHECK(reloaded.algorithms.size() == config.algorithms.size());
    CHECK(reloaded.xi.value() == config.xi.value());
    CHECK(reloaded.synthetic->p_max == config.synthetic->p_max);
    CHECK(reloaded.dus.eval_budget == config.dus.eval_budget);

    Json bad = config_to_json(config);
    bad["algorithms"].push_back("wizardry");
    CHECK_THROWS_AS(config_from_json(bad), validation_error);

    Json no_source = config_to_json(config);
    no_source.erase("synthetic");
    CHECK_THROWS_AS(config_from_json(no_source), validation_error);

    ExperimentConfig advice_without_forecasts = config;
    advice_without_forecasts.xi.reset();
    CHECK_THROWS_AS(advice_without_forecasts.validate(), validation_error);
}
