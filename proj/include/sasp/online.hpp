// Online drivers and their theoretical bound calculators.
//
// Every driver runs through the same loop: a policy proposes a fraction from
// the information revealed so far, and the driver clamps the proposal into
// [compulsory floor, remaining capacity] so the schedule always completes by
// the deadline. Policies see only (t, p_t, x_{t-1}, w_{t-1}); future prices
// are structurally out of reach.

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sasp/dus.hpp"
#include "sasp/types.hpp"

namespace sasp {

struct RunRecord {
    std::string algorithm_name;
    Schedule schedule;
    CostBreakdown cost;
    // Utilization reached through the policy's own purchases, net of floor-
    // forced additions (the compulsory trade).
    double final_utilization_pre_compulsory = 0.0;
    std::optional<double> gamma_used;  // advice weight (UQ-Advice, RO-Advice)
    std::optional<double> dus_used;    // decision uncertainty score (UQ-Advice)
    std::optional<double> empirical_cr;
    bool clamped = false;  // true when the floor/cap clipped any proposal
};

/// Per-step decision rule; t is 1-based. Must return a finite, non-negative
/// proposal using only information revealed by step t.
using PolicyFn = std::function<double(int t, double price, double x_prev, double w_prev)>;

/// Runs a policy to completion. At each step the final decision is the
/// proposal clamped into [compulsory_floor, min(d_t, 1 - w_prev)].
/// Throws validation_error on NaN or negative proposals.
RunRecord run_online(const Instance& instance, const PolicyFn& policy, std::string name);

/// Robust threshold algorithm: each step solves the pseudo-cost minimization
/// against the threshold function.
RunRecord roro_run(const Instance& instance);

/// Learning-augmented driver with an automatically chosen advice weight:
/// precomputes the advice OPT(point forecast) and the decision uncertainty
/// score, sets gamma = 1 - score/2, then mixes gamma * advice_t +
/// (1 - gamma) * robust_t at every step. The robust sub-decision is computed
/// from the shared combined state (w_{t-1}, x_{t-1}), not from a shadow
/// trajectory.
RunRecord uq_advice_run(const Instance& instance, const UqForecast& forecast,
                        const DusConfig& dus_config);

/// uq_advice_run with the advice and score precomputed by the caller
/// (batch harnesses compute both once per instance and reuse them).
RunRecord uq_advice_run_prepared(const Instance& instance, const Vec& advice_decisions,
                                 const DusResult& dus, double inflation = 1.0);

/// Fixed-trust mixing baseline: advice weight rho in [0, 1], advice derived
/// from the given price forecast.
RunRecord ro_advice_run(const Instance& instance, const Vec& advice_prices, double trust);

/// ro_advice_run with precomputed advice decisions.
RunRecord ro_advice_run_prepared(const Instance& instance, const Vec& advice_decisions,
                                 double trust);

/// Buys at full available rate whenever the price is below sqrt(p_min*p_max).
RunRecord threshold_run(const Instance& instance);

/// Competitive ratio under exact point forecasts: eta = 1 + (alpha-1)*dus/2.
double consistency_bound(double alpha, double dus);

/// Competitive ratio under arbitrarily wrong forecasts:
///   zeta = (1 - dus/2) * (p_max + 2 beta + lambda) / (p_min + lambda/T) + (dus/2) * alpha.
double robustness_bound(const ProblemParams& params, double alpha, double dus);

/// Competitive ratio when the true prices lie inside the uncertainty boxes:
///   theta = 1 + (dus/2) * (alpha - 1 +
///           (1 - dus/2) * (p_max - p_min + 4 beta + 2 lambda) / (p_min + lambda/T)).
double uq_robustness_bound(const ProblemParams& params, double alpha, double dus);

/// Evaluates `bound` at both the heuristic score and score + slack and keeps
/// the looser value; the bounds are not monotone in the score, and the
/// heuristic only lower-bounds the true maximum.
double bound_with_dus_guard(const std::function<double(double)>& bound, double dus,
                            double slack = 0.05);

}  // namespace sasp
