// Core domain types for the signal-aware workload shifting problem:
// problem parameters, instances, UQ forecasts, schedules, and the cost model
//
//   cost(x) = sum_t p_t x_t  +  beta * sum_{t=1..T+1} |x_t - x_{t-1}|  +  lambda * sum_t x_t^2
//
// with the boundary convention x_0 = x_{T+1} = 0, subject to sum_t x_t = 1
// and 0 <= x_t <= d_t.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sasp {

using Vec = std::vector<double>;

/// Absolute tolerance on the budget constraint sum_t x_t = 1.
inline constexpr double kBudgetTolerance = 1e-9;

/// Input/validation failures (malformed files, invariant violations).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failed to reach its tolerance; carries the best iterate
/// found and its residual.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, double residual,
                 std::vector<double> best_iterate = {})
        : std::runtime_error(what), residual(residual),
          best_iterate(std::move(best_iterate)) {}
    double residual;
    std::vector<double> best_iterate;
};

struct ProblemParams {
    double p_min = 0.0;       // lower edge of the admissible signal band (> 0)
    double p_max = 0.0;       // upper edge of the admissible signal band
    double beta = 0.0;        // switching penalty per unit decision change
    double lambda_reg = 0.0;  // quadratic regularizer weight
    int horizon = 0;          // number of steps T
    Vec rate_limits;          // d_t in (0,1], one per step

    /// Params with a uniform rate limit d_t = d for all steps.
    static ProblemParams uniform(double p_min, double p_max, double beta, double lambda_reg,
                                 int horizon, double rate_limit = 1.0);

    double band() const { return p_max - p_min; }

    /// Throws validation_error on the first violated assumption:
    /// 0 < p_min <= p_max, beta == 0 or beta < band/2, lambda_reg == 0 or
    /// lambda_reg < band, d_t in (0,1], sum_t d_t >= 1.
    void validate() const;
};

struct Instance {
    ProblemParams params;
    Vec prices;  // length T, each within [p_min, p_max] (closed interval)

    void validate() const;
};

/// Per-step point forecast with an uncertainty interval [lower_t, upper_t]
/// containing the true signal with probability 1 - coverage_delta.
struct UqForecast {
    Vec point;
    Vec lower;
    Vec upper;
    double coverage_delta = 0.0;

    /// Validates lower <= point <= upper and that the box lies inside the
    /// admissible band of `params`.
    void validate(const ProblemParams& params) const;

    /// True when every interval has zero width (the box is a single point).
    bool degenerate() const;
};

/// A decision vector together with its running utilization w_t = sum_{tau<=t} x_tau.
struct Schedule {
    Vec decisions;
    Vec utilization;

    static Schedule from_decisions(Vec decisions);
};

struct CostBreakdown {
    double signal_cost = 0.0;
    double switching_cost = 0.0;
    double regularizer_cost = 0.0;
    double total = 0.0;
};

enum class ViolationKind {
    DimensionMismatch,  // decision vector length != T
    BelowZero,          // x_t < 0
    AboveRateLimit,     // x_t > d_t
    BudgetSum,          // |sum_t x_t - 1| > tolerance
};

struct Violation {
    ViolationKind kind = ViolationKind::BudgetSum;
    std::size_t index = 0;    // step index (0-based); unused for BudgetSum
    double magnitude = 0.0;   // size of the violation

    std::string describe() const;
};

struct FeasibilityReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// Report-style feasibility check. Lists every violated constraint with its
/// index and magnitude; an empty report means `decisions` is feasible.
FeasibilityReport check_feasible(const ProblemParams& params, const Vec& decisions);

/// Evaluates the three-term objective on a feasible schedule.
/// Throws validation_error naming the first violated constraint otherwise.
CostBreakdown evaluate_cost(const Instance& instance, const Schedule& schedule);

/// Cost of a raw decision vector without feasibility checks. Used internally
/// where the vector is known-feasible or deliberately infeasible (advice
/// evaluated on true prices).
CostBreakdown evaluate_cost_unchecked(const ProblemParams& params, const Vec& prices,
                                      const Vec& decisions);

/// Minimum amount that must be executed at step t (1-based) so the remaining
/// rate limits can still complete the workload:
///
///   L_t = max(0, (1 - w_prev) - sum_{tau=t+1..T} d_tau).
///
/// Enforcing x_t >= L_t at every step realizes the compulsory trade.
double compulsory_floor(const ProblemParams& params, int t, double w_prev);

}  // namespace sasp
