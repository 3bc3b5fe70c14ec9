// Benchmark comparing the serial reference path (jobs = 1) against the
// OpenMP-parallel path on the three batch-heavy kernels: offline solves,
// uncertainty-score searches, and a full experiment. Verifies along the way
// that both paths produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sasp/data.hpp"
#include "sasp/dus.hpp"
#include "sasp/experiments.hpp"
#include "sasp/offline.hpp"
#include "sasp/parallel.hpp"
#include "sasp/rng.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Fn>
double timed(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return seconds_since(start);
}

bool same(const sasp::Vec& a, const sasp::Vec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs OpenMP benchmark for batch kernels"};
    int jobs = sasp::hardware_jobs();
    int n_instances = 200;
    int horizon = 8;
    int dus_budget = 200;
    app.add_option("--jobs", jobs, "Parallel jobs")->capture_default_str();
    app.add_option("--instances", n_instances, "Batch size")->capture_default_str();
    app.add_option("--horizon", horizon, "Instance horizon")->capture_default_str();
    app.add_option("--dus-budget", dus_budget, "Uncertainty-score budget")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const sasp::Trace trace = sasp::synthetic_trace(4096, 100.0, 400.0, 7);
    const std::vector<sasp::Instance> instances =
        sasp::sample_instances(trace, horizon, n_instances, 11, /*beta=*/20.0, /*lambda=*/0.0);

    // Batch offline solves.
    const auto solve_batch = [&](int run_jobs, sasp::Vec& totals) {
        totals.assign(instances.size(), 0.0);
        sasp::parallel_for_index(instances.size(), run_jobs, [&](std::size_t i) {
            totals[i] = sasp::opt_deterministic_tiebreak(instances[i].params,
                                                         instances[i].prices)
                            .cost.total;
        });
    };
    sasp::Vec serial_totals, parallel_totals;
    const double solve_serial = timed([&] { solve_batch(1, serial_totals); });
    const double solve_parallel = timed([&] { solve_batch(jobs, parallel_totals); });
    if (!same(serial_totals, parallel_totals)) {
        std::fprintf(stderr, "FAIL: offline batch results differ between paths\n");
        return 1;
    }

    // Batch uncertainty-score searches (the search itself fans out).
    const auto dus_batch = [&](int run_jobs, sasp::Vec& scores) {
        scores.assign(instances.size(), 0.0);
        sasp::parallel_for_index(instances.size(), run_jobs, [&](std::size_t i) {
            sasp::SynthUqConfig synth;
            synth.xi = 0.5;
            synth.seed = sasp::CounterRng::mix(3, i);
            sasp::DusConfig config;
            config.eval_budget = dus_budget;
            config.seed = sasp::CounterRng::mix(5, i);
            const sasp::UqForecast forecast = sasp::synth_uq(instances[i], synth, config);
            scores[i] = sasp::dus_solve(instances[i].params, forecast, config).score;
        });
    };
    sasp::Vec serial_scores, parallel_scores;
    const double dus_serial = timed([&] { dus_batch(1, serial_scores); });
    const double dus_parallel = timed([&] { dus_batch(jobs, parallel_scores); });
    if (!same(serial_scores, parallel_scores)) {
        std::fprintf(stderr, "FAIL: uncertainty-score batch results differ between paths\n");
        return 1;
    }

    // Full experiment.
    sasp::ExperimentConfig config;
    config.synthetic = sasp::SyntheticSpec{2048, 100.0, 400.0};
    config.horizon = horizon;
    config.n_instances = n_instances;
    config.xi = 0.5;
    config.dus.eval_budget = dus_budget;
    config.master_seed = 17;
    for (const char* name : {"roro", "threshold", "uq-advice", "ro-advice:0.5"}) {
        config.algorithms.push_back(sasp::AlgorithmSpec::parse(name));
    }
    config.jobs = 1;
    sasp::ExperimentResult serial_result, parallel_result;
    const double exp_serial = timed([&] { serial_result = sasp::run_experiment(config); });
    config.jobs = jobs;
    const double exp_parallel = timed([&] { parallel_result = sasp::run_experiment(config); });
    for (std::size_t a = 0; a < serial_result.stats.size(); ++a) {
        if (serial_result.stats[a].mean != parallel_result.stats[a].mean) {
            std::fprintf(stderr, "FAIL: experiment results differ between paths\n");
            return 1;
        }
    }

    char parallel_header[32];
    std::snprintf(parallel_header, sizeof(parallel_header), "jobs=%d[s]", jobs);
    std::printf("%-24s %10s %10s %8s\n", "kernel", "serial[s]", parallel_header, "speedup");
    std::printf("%-24s %10.3f %10.3f %7.2fx\n", "offline batch", solve_serial, solve_parallel,
                solve_serial / std::max(solve_parallel, 1e-9));
    std::printf("%-24s %10.3f %10.3f %7.2fx\n", "uncertainty-score batch", dus_serial,
                dus_parallel, dus_serial / std::max(dus_parallel, 1e-9));
    std::printf("%-24s %10.3f %10.3f %7.2fx\n", "experiment", exp_serial, exp_parallel,
                exp_serial / std::max(exp_parallel, 1e-9));
    std::printf("results identical across paths (jobs=%d)\n", jobs);
    return 0;
}
