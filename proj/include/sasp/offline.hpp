// Offline optimal solver for
//
//   min  sum_t z_t x_t + beta * sum_{t=1..T+1} |x_t - x_{t-1}| + lambda * sum_t x_t^2
//   s.t. sum_t x_t = 1,  0 <= x_t <= d_t,
//
// via a primal-dual interior-point method on the epigraph reformulation of
// the absolute-value terms (a linearly constrained QP; an LP when lambda = 0).
// Also provides an exhaustive grid oracle for small horizons and a
// deterministic tie-break wrapper used wherever a unique argmin is required.

#pragma once

#include "sasp/types.hpp"

namespace sasp {

struct SolveReport {
    Schedule schedule;
    CostBreakdown cost;   // evaluated with the caller's lambda_reg
    int iterations = 0;
    double residual = 0.0;  // max scaled KKT/feasibility residual at exit
};

/// Objective tolerance of solve_opt, as a multiple of max(1, p_max).
inline constexpr double kOptTolerance = 1e-6;

/// Deterministic epsilon-optimal solve. `prices` may be any scenario within
/// the [p_min, p_max] band (point forecasts, box scenarios, true prices).
/// Throws validation_error for infeasible params or out-of-band prices and
/// solver_error (carrying the best iterate's residual) on non-convergence.
SolveReport solve_opt(const ProblemParams& params, const Vec& prices);

/// Exhaustive enumeration over the grid {0, step, 2*step, ...}^T intersected
/// with the feasible set; exact minimum over the grid. Guarded to T <= 4.
/// `grid_step` must divide 1 evenly.
SolveReport brute_force_opt(const ProblemParams& params, const Vec& prices, double grid_step);

/// solve_opt with a deterministic selection among non-unique optima: when
/// lambda_reg = 0, solves with an internal regularizer 1e-9 * p_max and
/// reports costs under the caller's (zero) lambda. Identical to solve_opt
/// when lambda_reg > 0.
SolveReport opt_deterministic_tiebreak(const ProblemParams& params, const Vec& prices);

}  // namespace sasp
