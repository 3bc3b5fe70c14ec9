// Decision uncertainty score: the largest l1 distance between the optimal
// decisions under the point forecast and under any scenario inside the
// uncertainty box,
//
//   score = max_{l <= z <= u} || OPT(point) - OPT(z) ||_1   in [0, 2].
//
// The maximization is non-convex; this module runs a budgeted multi-start
// coordinate search (box vertices, Latin-hypercube interior samples, the two
// extreme scenarios, and the mirrored point forecast, each refined by cyclic
// per-coordinate golden-section). The returned score is a valid lower bound
// on the true maximum and is never certified (is_certified stays false).
//
// A certified global search is possible when the regularizer is positive --
// the objective is Lipschitz with constant sqrt(T) / (2 lambda) -- but its
// iteration count grows exponentially in T and the constant diverges as
// lambda -> 0, the setting every standard experiment runs in. This module
// deliberately trades the certificate for an evaluation budget; `epsilon`
// records the gap a certified scheme would target.

#pragma once

#include <cstdint>
#include <vector>

#include "sasp/types.hpp"

namespace sasp {

struct DusConfig {
    int eval_budget = 500;    // total offline solves the search may spend
    int n_starts = 16;        // multi-start candidates (extremes included)
    int refine_iters = 8;     // golden-section iterations per coordinate
    std::uint64_t seed = 0;
    double epsilon = 0.0;     // target gap of a certified scheme; recorded, not guaranteed
    double inflation = 1.0;   // score multiplier applied when deriving gamma (>= 1)
    int jobs = 1;             // parallel start/refinement evaluation
};

struct DusResult {
    double score = 0.0;       // lower bound on the true maximum, in [0, 2]
    Vec worst_scenario;       // maximizing scenario found (within the box)
    int evals_used = 0;       // offline solves spent
    bool is_certified = false;
};

/// || OPT(point) - OPT(z) ||_1 for one scenario, using the deterministic
/// tie-break solver on both sides. `advice_decisions` = OPT(point).
double dus_objective(const ProblemParams& params, const Vec& advice_decisions,
                     const Vec& scenario);

/// The seed-derived multi-start candidate list (deduplicated, deterministic).
/// Exposed so tests can clip one box's candidates into a nested box.
std::vector<Vec> dus_start_scenarios(const ProblemParams& params, const UqForecast& forecast,
                                     const DusConfig& config);

DusResult dus_solve(const ProblemParams& params, const UqForecast& forecast,
                    const DusConfig& config);

/// dus_solve with additional caller-supplied starting scenarios merged into
/// the candidate pool (each must lie inside the box).
DusResult dus_solve_with_starts(const ProblemParams& params, const UqForecast& forecast,
                                const DusConfig& config, const std::vector<Vec>& extra_starts);

/// Independent lower-bound oracle: max objective over `n_samples` uniform box
/// samples plus the 2T single-coordinate-extreme scenarios.
double dus_sample_bound(const ProblemParams& params, const UqForecast& forecast, int n_samples,
                        std::uint64_t seed);

/// Mixing parameter gamma = 1 - score/2 in [0, 1].
double gamma_from_dus(double score);

}  // namespace sasp
