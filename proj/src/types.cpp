#include "sasp/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace sasp {

ProblemParams ProblemParams::uniform(double p_min, double p_max, double beta, double lambda_reg,
                                     int horizon, double rate_limit) {
    ProblemParams params;
    params.p_min = p_min;
    params.p_max = p_max;
    params.beta = beta;
    params.lambda_reg = lambda_reg;
    params.horizon = horizon;
    params.rate_limits.assign(static_cast<std::size_t>(horizon > 0 ? horizon : 0), rate_limit);
    return params;
}

void ProblemParams::validate() const {
    if (!(p_min > 0.0) || !std::isfinite(p_min)) {
        throw validation_error("p_min must be a positive finite price");
    }
    if (!(p_max >= p_min) || !std::isfinite(p_max)) {
        throw validation_error("p_max must satisfy p_max >= p_min");
    }
    // beta = 0 is always admissible, including the degenerate band p_min = p_max.
    if (beta < 0.0 || (beta > 0.0 && beta >= band() / 2.0)) {
        throw validation_error("beta must lie in [0, (p_max - p_min)/2)");
    }
    if (lambda_reg < 0.0 || (lambda_reg > 0.0 && lambda_reg >= band())) {
        throw validation_error("lambda_reg must lie in [0, p_max - p_min)");
    }
    if (horizon < 1) {
        throw validation_error("horizon must be a positive integer");
    }
    if (rate_limits.size() != static_cast<std::size_t>(horizon)) {
        throw validation_error("rate_limits must have exactly `horizon` entries");
    }
    double total_capacity = 0.0;
    for (std::size_t t = 0; t < rate_limits.size(); ++t) {
        const double d = rate_limits[t];
        if (!(d > 0.0) || d > 1.0 || !std::isfinite(d)) {
            std::ostringstream msg;
            msg << "rate limit d[" << t << "] = " << d << " must lie in (0, 1]";
            throw validation_error(msg.str());
        }
        total_capacity += d;
    }
    if (total_capacity < 1.0 - 1e-12) {
        std::ostringstream msg;
        msg << "rate limits sum to " << total_capacity << " < 1; no feasible schedule exists";
        throw validation_error(msg.str());
    }
}

void Instance::validate() const {
    params.validate();
    if (prices.size() != static_cast<std::size_t>(params.horizon)) {
        throw validation_error("price vector length does not match horizon");
    }
    for (std::size_t t = 0; t < prices.size(); ++t) {
        const double p = prices[t];
        if (!std::isfinite(p) || p < params.p_min || p > params.p_max) {
            std::ostringstream msg;
            msg << "price p[" << t << "] = " << p << " outside [" << params.p_min << ", "
                << params.p_max << "]";
            throw validation_error(msg.str());
        }
    }
}

void UqForecast::validate(const ProblemParams& params) const {
    const auto T = static_cast<std::size_t>(params.horizon);
    if (point.size() != T || lower.size() != T || upper.size() != T) {
        throw validation_error("forecast vectors must all have length T");
    }
    if (coverage_delta < 0.0 || coverage_delta > 1.0) {
        throw validation_error("coverage_delta must lie in [0, 1]");
    }
    for (std::size_t t = 0; t < T; ++t) {
        if (!(lower[t] <= point[t] && point[t] <= upper[t])) {
            std::ostringstream msg;
            msg << "forecast ordering violated at step " << t << ": lower=" << lower[t]
                << " point=" << point[t] << " upper=" << upper[t];
            throw validation_error(msg.str());
        }
        if (lower[t] < params.p_min - 1e-12 || upper[t] > params.p_max + 1e-12) {
            std::ostringstream msg;
            msg << "forecast box at step " << t << " leaves the admissible band ["
                << params.p_min << ", " << params.p_max << "]";
            throw validation_error(msg.str());
        }
    }
}

bool UqForecast::degenerate() const {
    for (std::size_t t = 0; t < lower.size(); ++t) {
        if (upper[t] > lower[t]) return false;
    }
    return true;
}

Schedule Schedule::from_decisions(Vec decisions) {
    Schedule schedule;
    schedule.utilization.resize(decisions.size());
    double w = 0.0;
    for (std::size_t t = 0; t < decisions.size(); ++t) {
        w += decisions[t];
        schedule.utilization[t] = w;
    }
    schedule.decisions = std::move(decisions);
    return schedule;
}

std::string Violation::describe() const {
    std::ostringstream msg;
    switch (kind) {
        case ViolationKind::DimensionMismatch:
            msg << "decision vector has wrong length (got " << index << ", magnitude "
                << magnitude << ")";
            break;
        case ViolationKind::BelowZero:
            msg << "decision x[" << index << "] below 0 by " << magnitude;
            break;
        case ViolationKind::AboveRateLimit:
            msg << "decision x[" << index << "] exceeds rate limit by " << magnitude;
            break;
        case ViolationKind::BudgetSum:
            msg << "budget constraint violated: |sum x - 1| = " << magnitude;
            break;
    }
    return msg.str();
}

FeasibilityReport check_feasible(const ProblemParams& params, const Vec& decisions) {
    FeasibilityReport report;
    const auto T = static_cast<std::size_t>(params.horizon);
    if (decisions.size() != T) {
        report.violations.push_back({ViolationKind::DimensionMismatch, decisions.size(),
                                     std::fabs(static_cast<double>(decisions.size()) -
                                               static_cast<double>(T))});
        return report;
    }
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double x = decisions[t];
        if (!(x >= 0.0)) {  // catches NaN as well
            report.violations.push_back({ViolationKind::BelowZero, t, -x});
        } else if (x > params.rate_limits[t]) {
            report.violations.push_back(
                {ViolationKind::AboveRateLimit, t, x - params.rate_limits[t]});
        }
        total += x;
    }
    if (std::fabs(total - 1.0) > kBudgetTolerance) {
        report.violations.push_back({ViolationKind::BudgetSum, 0, std::fabs(total - 1.0)});
    }
    return report;
}

CostBreakdown evaluate_cost_unchecked(const ProblemParams& params, const Vec& prices,
                                      const Vec& decisions) {
    CostBreakdown cost;
    double prev = 0.0;  // x_0 = 0
    for (std::size_t t = 0; t < decisions.size(); ++t) {
        const double x = decisions[t];
        cost.signal_cost += prices[t] * x;
        cost.switching_cost += params.beta * std::fabs(x - prev);
        cost.regularizer_cost += params.lambda_reg * x * x;
        prev = x;
    }
    cost.switching_cost += params.beta * std::fabs(0.0 - prev);  // x_{T+1} = 0
    cost.total = cost.signal_cost + cost.switching_cost + cost.regularizer_cost;
    return cost;
}

CostBreakdown evaluate_cost(const Instance& instance, const Schedule& schedule) {
    if (schedule.decisions.size() != instance.prices.size()) {
        throw validation_error("schedule and instance dimensions do not match");
    }
    const FeasibilityReport report = check_feasible(instance.params, schedule.decisions);
    if (!report.ok()) {
        throw validation_error("infeasible schedule: " + report.violations.front().describe());
    }
    return evaluate_cost_unchecked(instance.params, instance.prices, schedule.decisions);
}

double compulsory_floor(const ProblemParams& params, int t, double w_prev) {
    if (t < 1 || t > params.horizon) {
        throw validation_error("compulsory_floor: step index out of range");
    }
    double remaining_capacity = 0.0;
    for (int tau = t; tau < params.horizon; ++tau) {
        remaining_capacity += params.rate_limits[static_cast<std::size_t>(tau)];
    }
    return std::max(0.0, (1.0 - w_prev) - remaining_capacity);
}

}  // namespace sasp
