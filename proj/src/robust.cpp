#include "sasp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sasp {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

double initial_guess(double x) {
    if (x < -0.30) {
        // Branch-point series in p = sqrt(2 (e x + 1)).
        const double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
        return -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p * p * p;
    }
    if (x < 1.0) {
        return x * (1.0 - x);  // truncated Taylor series around 0
    }
    const double l = std::log(x);
    return l > 1.0 ? l - std::log(l) : 0.5 + 0.2 * l;
}

}  // namespace

double lambert_w0(double x) {
    if (!(x >= -kInvE - 1e-12)) {
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    x = std::max(x, -kInvE);
    if (x == 0.0) return 0.0;

    const double tol = 1e-13 * std::max(1.0, std::fabs(x));

    // Bracket [lo, hi] with f(lo) <= 0 <= f(hi); f(w) = w e^w - x is
    // increasing on [-1, inf).
    double lo = -1.0;
    double hi = 1.0 + (x > 1.0 ? std::log(x) : 0.0);
    double w = std::clamp(initial_guess(x), lo, hi);

    double best_w = w;
    double best_f = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::fabs(f) < std::fabs(best_f)) {
            best_f = f;
            best_w = w;
            if (std::fabs(f) <= tol) break;
        }
        if (f < 0.0) {
            lo = w;
        } else {
            hi = w;
        }
        // Halley step; bisect whenever it degenerates or leaves the bracket.
        const double fp = ew * (w + 1.0);
        const double step_denom = fp - f * (w + 2.0) / (2.0 * (w + 1.0));
        double next = 0.5 * (lo + hi);
        if (w > -1.0 && std::isfinite(step_denom) && step_denom != 0.0) {
            const double candidate = w - f / step_denom;
            if (candidate > lo && candidate < hi) next = candidate;
        }
        if (next == w) break;
        w = next;
    }
    if (!(std::fabs(best_f) <= 1e-12 * std::max(1.0, std::fabs(x)))) {
        throw solver_error("lambert_w0 failed to converge", std::fabs(best_f));
    }
    return best_w;
}

double alpha_roro(const ProblemParams& params) {
    params.validate();
    const double ratio_term = 2.0 * params.beta / params.p_max;
    const double argument =
        ((2.0 * params.beta + params.p_min) / params.p_max - 1.0) * std::exp(ratio_term - 1.0);
    const double w = lambert_w0(argument);
    const double alpha = 1.0 / (w - ratio_term + 1.0);
    // The argument lies in (-1/e, 0] for valid params, so the bracket is
    // positive and alpha >= 1 up to roundoff.
    return std::max(1.0, alpha);
}

double alpha_sasp(const ProblemParams& params) {
    const double alpha = alpha_roro(params);
    if (params.lambda_reg == 0.0) return alpha;
    const double t = static_cast<double>(params.horizon);
    return t * (alpha * params.p_min + params.lambda_reg) /
           (t * params.p_min + params.lambda_reg);
}

double roro_worst_case_bound(const ProblemParams& params) {
    const double alpha = alpha_roro(params);
    if (params.lambda_reg == 0.0) return alpha;
    const double t = static_cast<double>(params.horizon);
    const auto ratio_at = [&](double v) {
        return (alpha * v + params.lambda_reg) / (v + params.lambda_reg / t);
    };
    return std::max(ratio_at(params.p_min), ratio_at(params.p_max / alpha));
}

ThresholdSpec make_threshold_spec(const ProblemParams& params) {
    ThresholdSpec spec;
    spec.params = params;
    spec.alpha_roro = alpha_roro(params);
    spec.coefficient_c = params.p_max / spec.alpha_roro - params.p_max + 2.0 * params.beta;
    return spec;
}

namespace {

void require_unit_range(double w, const char* what) {
    if (!(w >= -1e-12 && w <= 1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << what << " = " << w << " outside [0, 1]";
        throw validation_error(msg.str());
    }
}

}  // namespace

double phi(const ThresholdSpec& spec, double w) {
    require_unit_range(w, "utilization");
    w = std::clamp(w, 0.0, 1.0);
    return spec.params.p_max - spec.params.beta +
           spec.coefficient_c * std::exp(w / spec.alpha_roro);
}

double phi_inverse(const ThresholdSpec& spec, double y) {
    const double y_lo = spec.params.p_min + spec.params.beta;   // phi(1)
    const double y_hi = phi(spec, 0.0);                         // p_max/alpha + beta
    const double tol = 1e-9 * std::max(1.0, std::fabs(y_hi));
    if (!(y >= y_lo - tol && y <= y_hi + tol)) {
        std::ostringstream msg;
        msg << "phi_inverse: y = " << y << " outside threshold range [" << y_lo << ", " << y_hi
            << "]";
        throw validation_error(msg.str());
    }
    if (spec.coefficient_c == 0.0) return 0.0;  // phi is constant; any w maps to y
    const double ratio = (y - spec.params.p_max + spec.params.beta) / spec.coefficient_c;
    const double w = spec.alpha_roro * std::log(std::max(ratio, 1e-300));
    return std::clamp(w, 0.0, 1.0);
}

double phi_integral(const ThresholdSpec& spec, double a, double b) {
    require_unit_range(a, "integration bound a");
    require_unit_range(b, "integration bound b");
    if (a > b + 1e-12) {
        throw validation_error("phi_integral: a > b");
    }
    a = std::clamp(a, 0.0, 1.0);
    b = std::clamp(b, a, 1.0);
    const double alpha = spec.alpha_roro;
    return (spec.params.p_max - spec.params.beta) * (b - a) +
           spec.coefficient_c * alpha * (std::exp(b / alpha) - std::exp(a / alpha));
}

double pseudo_cost_step(const ThresholdSpec& spec, double price, double x_prev, double w_prev,
                        double cap) {
    require_unit_range(x_prev, "x_prev");
    require_unit_range(w_prev, "w_prev");
    if (!(cap >= -1e-12 && cap <= 1.0 - w_prev + 1e-9)) {
        throw validation_error("pseudo_cost_step: cap outside [0, 1 - w_prev]");
    }
    cap = std::clamp(cap, 0.0, 1.0 - std::clamp(w_prev, 0.0, 1.0));
    if (cap <= 0.0) return 0.0;

    const auto objective = [&](double x) {
        return price * x + spec.params.beta * std::fabs(x - x_prev) -
               phi_integral(spec, w_prev, std::min(1.0, w_prev + x));
    };

    double candidates[5];
    int n_candidates = 0;
    candidates[n_candidates++] = 0.0;
    candidates[n_candidates++] = cap;
    candidates[n_candidates++] = std::clamp(x_prev, 0.0, cap);
    // Stationary points of the two smooth pieces: phi(w_prev + x) = price +- beta.
    const double y_lo = spec.params.p_min + spec.params.beta;
    const double y_hi = phi(spec, 0.0);
    for (const double y : {price + spec.params.beta, price - spec.params.beta}) {
        if (y >= y_lo && y <= y_hi) {
            const double x = phi_inverse(spec, y) - w_prev;
            if (x > 0.0 && x < cap) candidates[n_candidates++] = x;
        }
    }

    std::sort(candidates, candidates + n_candidates);
    double best_x = candidates[0];
    double best_value = objective(best_x);
    for (int i = 1; i < n_candidates; ++i) {
        const double value = objective(candidates[i]);
        if (value < best_value - 1e-12 * std::max(1.0, std::fabs(best_value))) {
            best_value = value;
            best_x = candidates[i];
        }
    }
    return best_x;
}

}  // namespace sasp
