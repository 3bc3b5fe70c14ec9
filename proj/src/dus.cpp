#include "sasp/dus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sasp/offline.hpp"
#include "sasp/parallel.hpp"
#include "sasp/rng.hpp"

namespace sasp {

namespace {

constexpr int kSweeps = 2;  // cyclic coordinate passes per refined start
constexpr double kGolden = 0.6180339887498949;

double l1_distance(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

Vec clamp_to_box(Vec z, const UqForecast& forecast) {
    for (std::size_t t = 0; t < z.size(); ++t) {
        z[t] = std::clamp(z[t], forecast.lower[t], forecast.upper[t]);
    }
    return z;
}

void dedupe_in_order(std::vector<Vec>& scenarios) {
    std::vector<Vec> unique;
    unique.reserve(scenarios.size());
    for (auto& z : scenarios) {
        bool seen = false;
        for (const auto& existing : unique) {
            if (existing == z) {
                seen = true;
                break;
            }
        }
        if (!seen) unique.push_back(std::move(z));
    }
    scenarios = std::move(unique);
}

struct RefineOutcome {
    Vec scenario;
    double score = 0.0;
    int evals = 0;
};

// Hill-climbs one start: per coordinate, a golden-section scan of the
// interval keeps the best evaluated point. Consumes at most `quota` solves.
RefineOutcome refine_start(const ProblemParams& params, const UqForecast& forecast,
                           const Vec& advice, const DusConfig& config, Vec z, double score,
                           int quota) {
    RefineOutcome out;
    out.scenario = z;
    out.score = score;
    if (config.refine_iters < 2) return out;

    const auto T = z.size();
    int left = quota;
    const auto evaluate = [&](double& slot, double value) {
        slot = value;
        --left;
        ++out.evals;
        return dus_objective(params, advice, z);
    };

    for (int sweep = 0; sweep < kSweeps; ++sweep) {
        for (std::size_t t = 0; t < T; ++t) {
            const double lo = forecast.lower[t];
            const double hi = forecast.upper[t];
            if (!(hi > lo) || left < config.refine_iters) continue;
            const double keep = z[t];
            double a = lo, b = hi;
            double x1 = b - kGolden * (b - a);
            double x2 = a + kGolden * (b - a);
            double best_v = keep;
            double best_f = score;
            double f1 = evaluate(z[t], x1);
            if (f1 > best_f) {
                best_f = f1;
                best_v = x1;
            }
            double f2 = evaluate(z[t], x2);
            if (f2 > best_f) {
                best_f = f2;
                best_v = x2;
            }
            for (int it = 0; it < config.refine_iters - 2; ++it) {
                if (f1 < f2) {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + kGolden * (b - a);
                    f2 = evaluate(z[t], x2);
                    if (f2 > best_f) {
                        best_f = f2;
                        best_v = x2;
                    }
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - kGolden * (b - a);
                    f1 = evaluate(z[t], x1);
                    if (f1 > best_f) {
                        best_f = f1;
                        best_v = x1;
                    }
                }
            }
            z[t] = best_f > score ? best_v : keep;
            if (best_f > score) {
                score = best_f;
                out.scenario = z;
                out.score = score;
            }
        }
    }
    return out;
}

}  // namespace

double dus_objective(const ProblemParams& params, const Vec& advice_decisions,
                     const Vec& scenario) {
    const SolveReport report = opt_deterministic_tiebreak(params, scenario);
    return l1_distance(advice_decisions, report.schedule.decisions);
}

std::vector<Vec> dus_start_scenarios(const ProblemParams& params, const UqForecast& forecast,
                                     const DusConfig& config) {
    forecast.validate(params);
    const auto T = forecast.point.size();
    CounterRng rng(config.seed, /*stream=*/0x5C3A);

    std::vector<Vec> starts;
    starts.push_back(forecast.lower);
    starts.push_back(forecast.upper);
    // Mirror of the point forecast through the box center: a cheap
    // high-contrast scenario.
    Vec mirror(T);
    for (std::size_t t = 0; t < T; ++t) {
        mirror[t] = forecast.lower[t] + forecast.upper[t] - forecast.point[t];
    }
    starts.push_back(clamp_to_box(std::move(mirror), forecast));

    const int n_lhs = std::max(1, config.n_starts / 4);
    const int n_vertices = std::max(0, config.n_starts - n_lhs - static_cast<int>(starts.size()));

    for (int v = 0; v < n_vertices; ++v) {
        Vec z(T);
        for (std::size_t t = 0; t < T; ++t) {
            z[t] = (rng.next_u64() & 1u) ? forecast.upper[t] : forecast.lower[t];
        }
        starts.push_back(std::move(z));
    }

    if (n_lhs > 0) {
        // Latin hypercube: per coordinate, a shuffled assignment of strata.
        std::vector<std::vector<int>> strata(T, std::vector<int>(static_cast<std::size_t>(n_lhs)));
        for (std::size_t t = 0; t < T; ++t) {
            std::iota(strata[t].begin(), strata[t].end(), 0);
            for (int i = n_lhs - 1; i > 0; --i) {
                const auto j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
                std::swap(strata[t][static_cast<std::size_t>(i)], strata[t][static_cast<std::size_t>(j)]);
            }
        }
        for (int s = 0; s < n_lhs; ++s) {
            Vec z(T);
            for (std::size_t t = 0; t < T; ++t) {
                const double width = forecast.upper[t] - forecast.lower[t];
                z[t] = forecast.lower[t] +
                       width * (static_cast<double>(strata[t][static_cast<std::size_t>(s)]) + rng.next_unit()) /
                           static_cast<double>(n_lhs);
            }
            starts.push_back(std::move(z));
        }
    }

    dedupe_in_order(starts);
    return starts;
}

DusResult dus_solve(const ProblemParams& params, const UqForecast& forecast,
                    const DusConfig& config) {
    return dus_solve_with_starts(params, forecast, config, {});
}

DusResult dus_solve_with_starts(const ProblemParams& params, const UqForecast& forecast,
                                const DusConfig& config, const std::vector<Vec>& extra_starts) {
    forecast.validate(params);
    if (config.eval_budget < 2 || config.n_starts < 1) {
        throw validation_error("dus_solve: eval budget exhausted before any evaluation");
    }
    if (config.eval_budget < config.n_starts) {
        throw validation_error("dus_solve: eval_budget must be >= n_starts");
    }

    DusResult result;
    const SolveReport advice_report = opt_deterministic_tiebreak(params, forecast.point);
    const Vec& advice = advice_report.schedule.decisions;
    result.evals_used = 1;

    std::vector<Vec> starts = dus_start_scenarios(params, forecast, config);
    for (const Vec& z : extra_starts) {
        if (z.size() != forecast.point.size()) {
            throw validation_error("dus_solve: extra start has wrong length");
        }
        starts.push_back(clamp_to_box(z, forecast));
    }
    dedupe_in_order(starts);
    const int max_starts = config.eval_budget - result.evals_used;
    if (static_cast<int>(starts.size()) > max_starts) {
        starts.resize(static_cast<std::size_t>(max_starts));
    }

    const std::size_t n = starts.size();
    Vec scores(n, 0.0);
    parallel_for_index(n, config.jobs, [&](std::size_t i) {
        scores[i] = dus_objective(params, advice, starts[i]);
    });
    result.evals_used += static_cast<int>(n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    // Deterministic refinement quotas: split what remains of the budget over
    // the top starts, at least one full coordinate pass each when possible.
    const int remaining = config.eval_budget - result.evals_used;
    int active_coords = 0;
    for (std::size_t t = 0; t < forecast.point.size(); ++t) {
        if (forecast.upper[t] > forecast.lower[t]) ++active_coords;
    }
    const int cost_one = kSweeps * active_coords * config.refine_iters;
    std::vector<RefineOutcome> refined;
    if (remaining > 0 && cost_one > 0 && config.refine_iters >= 2) {
        const int n_refine = std::max(
            1, std::min(static_cast<int>(n), remaining / std::max(cost_one, 1)));
        const int quota = remaining / n_refine;
        refined.resize(static_cast<std::size_t>(n_refine));
        parallel_for_index(static_cast<std::size_t>(n_refine), config.jobs, [&](std::size_t k) {
            const std::size_t idx = order[k];
            refined[k] = refine_start(params, forecast, advice, config, starts[idx], scores[idx],
                                      quota);
        });
        for (const RefineOutcome& out : refined) result.evals_used += out.evals;
    }

    // Order-independent reduction: best score, ties toward the earlier slot.
    std::size_t best_start = order.empty() ? 0 : order[0];
    result.score = n > 0 ? scores[best_start] : 0.0;
    result.worst_scenario = n > 0 ? starts[best_start] : forecast.point;
    for (const RefineOutcome& out : refined) {
        if (out.score > result.score) {
            result.score = out.score;
            result.worst_scenario = out.scenario;
        }
    }
    result.score = std::clamp(result.score, 0.0, 2.0);
    result.is_certified = false;
    return result;
}

double dus_sample_bound(const ProblemParams& params, const UqForecast& forecast, int n_samples,
                        std::uint64_t seed) {
    forecast.validate(params);
    if (n_samples < 1) {
        throw validation_error("dus_sample_bound: n_samples must be >= 1");
    }
    const Vec advice = opt_deterministic_tiebreak(params, forecast.point).schedule.decisions;
    const auto T = forecast.point.size();
    CounterRng rng(seed, /*stream=*/0xB0C4);

    double best = 0.0;
    Vec z(T);
    for (int s = 0; s < n_samples; ++s) {
        for (std::size_t t = 0; t < T; ++t) {
            z[t] = rng.uniform(forecast.lower[t], forecast.upper[t]);
        }
        best = std::max(best, dus_objective(params, advice, z));
    }
    for (std::size_t t = 0; t < T; ++t) {
        for (const double extreme : {forecast.lower[t], forecast.upper[t]}) {
            z = forecast.point;
            z[t] = extreme;
            best = std::max(best, dus_objective(params, advice, z));
        }
    }
    return std::clamp(best, 0.0, 2.0);
}

double gamma_from_dus(double score) {
    if (!(score >= -1e-9 && score <= 2.0 + 1e-9)) {
        throw validation_error("gamma_from_dus: score outside [0, 2]");
    }
    return std::clamp(1.0 - score / 2.0, 0.0, 1.0);
}

}  // namespace sasp
