#include "sasp/online.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "sasp/offline.hpp"
#include "sasp/robust.hpp"

namespace sasp {

RunRecord run_online(const Instance& instance, const PolicyFn& policy, std::string name) {
    instance.validate();
    const ProblemParams& params = instance.params;
    const int T = params.horizon;

    RunRecord record;
    record.algorithm_name = std::move(name);
    Vec decisions(static_cast<std::size_t>(T), 0.0);

    double w = 0.0;
    double x_prev = 0.0;
    double forced = 0.0;  // total mass added by the compulsory floor
    for (int t = 1; t <= T; ++t) {
        const std::size_t i = static_cast<std::size_t>(t - 1);
        const double cap = std::max(0.0, std::min(params.rate_limits[i], 1.0 - w));
        const double floor = std::min(compulsory_floor(params, t, w), cap);

        const double proposal = policy(t, instance.prices[i], x_prev, w);
        if (std::isnan(proposal) || proposal < 0.0) {
            std::ostringstream msg;
            msg << "policy error at step " << t << ": proposal = " << proposal;
            throw validation_error(msg.str());
        }
        const double capped = std::min(proposal, cap);
        const double x = std::max(capped, floor);
        if (std::fabs(x - proposal) > 1e-12) record.clamped = true;
        forced += std::max(0.0, x - capped);

        decisions[i] = x;
        w += x;
        x_prev = x;
    }

    record.schedule = Schedule::from_decisions(std::move(decisions));
    record.cost = evaluate_cost(instance, record.schedule);
    record.final_utilization_pre_compulsory = std::clamp(w - forced, 0.0, 1.0);
    return record;
}

RunRecord roro_run(const Instance& instance) {
    instance.validate();
    const ThresholdSpec spec = make_threshold_spec(instance.params);
    const Vec& limits = instance.params.rate_limits;
    const PolicyFn policy = [&spec, &limits](int t, double price, double x_prev, double w_prev) {
        const double cap =
            std::max(0.0, std::min(limits[static_cast<std::size_t>(t - 1)], 1.0 - w_prev));
        return pseudo_cost_step(spec, price, x_prev, std::clamp(w_prev, 0.0, 1.0), cap);
    };
    return run_online(instance, policy, "roro");
}

namespace {

RunRecord mixed_advice_run(const Instance& instance, const Vec& advice, double gamma,
                           std::string name) {
    const ThresholdSpec spec = make_threshold_spec(instance.params);
    const Vec& limits = instance.params.rate_limits;
    const PolicyFn policy = [&](int t, double price, double x_prev, double w_prev) {
        const double cap =
            std::max(0.0, std::min(limits[static_cast<std::size_t>(t - 1)], 1.0 - w_prev));
        const double robust =
            pseudo_cost_step(spec, price, x_prev, std::clamp(w_prev, 0.0, 1.0), cap);
        return gamma * advice[static_cast<std::size_t>(t - 1)] + (1.0 - gamma) * robust;
    };
    return run_online(instance, policy, std::move(name));
}

}  // namespace

RunRecord uq_advice_run_prepared(const Instance& instance, const Vec& advice_decisions,
                                 const DusResult& dus, double inflation) {
    const double effective = std::min(2.0, dus.score * std::max(1.0, inflation));
    const double gamma = gamma_from_dus(effective);
    RunRecord record = mixed_advice_run(instance, advice_decisions, gamma, "uq-advice");
    record.gamma_used = gamma;
    record.dus_used = dus.score;
    return record;
}

RunRecord uq_advice_run(const Instance& instance, const UqForecast& forecast,
                        const DusConfig& dus_config) {
    instance.validate();
    forecast.validate(instance.params);
    const Vec advice =
        opt_deterministic_tiebreak(instance.params, forecast.point).schedule.decisions;
    const DusResult dus = dus_solve(instance.params, forecast, dus_config);
    return uq_advice_run_prepared(instance, advice, dus, dus_config.inflation);
}

RunRecord ro_advice_run_prepared(const Instance& instance, const Vec& advice_decisions,
                                 double trust) {
    if (!(trust >= 0.0 && trust <= 1.0)) {
        throw validation_error("ro_advice_run: trust must lie in [0, 1]");
    }
    RunRecord record = mixed_advice_run(instance, advice_decisions, trust, "ro-advice");
    record.gamma_used = trust;
    return record;
}

RunRecord ro_advice_run(const Instance& instance, const Vec& advice_prices, double trust) {
    instance.validate();
    const Vec advice =
        opt_deterministic_tiebreak(instance.params, advice_prices).schedule.decisions;
    return ro_advice_run_prepared(instance, advice, trust);
}

RunRecord threshold_run(const Instance& instance) {
    instance.validate();
    const double threshold = std::sqrt(instance.params.p_min * instance.params.p_max);
    const Vec& limits = instance.params.rate_limits;
    const PolicyFn policy = [&](int t, double price, double /*x_prev*/, double w_prev) {
        const double cap =
            std::max(0.0, std::min(limits[static_cast<std::size_t>(t - 1)], 1.0 - w_prev));
        return price < threshold ? cap : 0.0;
    };
    return run_online(instance, policy, "threshold");
}

namespace {

void require_dus_range(double dus) {
    if (!(dus >= -1e-9 && dus <= 2.0 + 1e-9)) {
        throw validation_error("bound calculator: dus outside [0, 2]");
    }
}

}  // namespace

double consistency_bound(double alpha, double dus) {
    require_dus_range(dus);
    return 1.0 + (alpha - 1.0) * dus / 2.0;
}

double robustness_bound(const ProblemParams& params, double alpha, double dus) {
    require_dus_range(dus);
    const double worst_ratio = (params.p_max + 2.0 * params.beta + params.lambda_reg) /
                               (params.p_min + params.lambda_reg / params.horizon);
    return (1.0 - dus / 2.0) * worst_ratio + (dus / 2.0) * alpha;
}

double uq_robustness_bound(const ProblemParams& params, double alpha, double dus) {
    require_dus_range(dus);
    const double gap_ratio =
        (params.p_max - params.p_min + 4.0 * params.beta + 2.0 * params.lambda_reg) /
        (params.p_min + params.lambda_reg / params.horizon);
    return 1.0 + (dus / 2.0) * (alpha - 1.0 + (1.0 - dus / 2.0) * gap_ratio);
}

double bound_with_dus_guard(const std::function<double(double)>& bound, double dus,
                            double slack) {
    return std::max(bound(dus), bound(std::min(dus + slack, 2.0)));
}

}  // namespace sasp
