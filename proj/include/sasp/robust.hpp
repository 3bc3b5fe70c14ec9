// Closed-form machinery of the robust online algorithm: the Lambert W
// function, the optimal ratio alpha for the switching-cost conversion
// problem, its extension to the regularized problem, and the dynamic
// threshold function
//
//   phi(w) = p_max - beta + C * exp(w / alpha),   C = p_max/alpha - p_max + 2*beta,
//
// which decreases from p_max/alpha + beta at w = 0 to p_min + beta at w = 1.
// The per-step pseudo-cost minimizer below drives the online drivers.

#pragma once

#include "sasp/types.hpp"

namespace sasp {

/// Principal branch W0 of the Lambert W function: returns w >= -1 with
/// w * e^w = x, for x >= -1/e. Guarded Halley iteration inside a bisection
/// bracket; the initial guess is a branch-point series for x near -1/e, a
/// truncated Taylor series for small |x|, and a log-based guess for large x.
/// Residual |w e^w - x| <= 1e-12 * max(1, |x|).
/// Throws std::domain_error for x < -1/e - 1e-12.
double lambert_w0(double x);

/// Optimal competitive ratio of the threshold algorithm on the unregularized
/// problem; >= 1, equal to 1 when p_min = p_max and beta = 0.
double alpha_roro(const ProblemParams& params);

/// Competitive ratio of the robust algorithm on the regularized problem:
///   alpha = T * (alpha_roro * p_min + lambda) / (T * p_min + lambda).
/// Coincides with alpha_roro when lambda = 0. For lambda > 0 this closed
/// form is a valid worst-case bound only when alpha_roro <= T; see
/// roro_worst_case_bound for the unconditional guarantee.
double alpha_sasp(const ProblemParams& params);

/// Unconditional worst-case ratio bound for the robust algorithm,
///   max over v in {p_min, p_max/alpha_roro} of (alpha_roro * v + lambda) / (v + lambda/T),
/// where v stands for the threshold value (net of the switching offset) at
/// the algorithm's pre-compulsory stopping utilization. The ratio is
/// monotone in v, so the maximum sits at an endpoint: at v = p_min this is
/// exactly alpha_sasp, at v = p_max/alpha_roro it covers the regime
/// alpha_roro > T that the closed form misses. Equal to alpha_sasp when
/// lambda = 0 or alpha_roro <= T.
double roro_worst_case_bound(const ProblemParams& params);

/// Precomputed threshold-function coefficients shared by phi and the
/// pseudo-cost step. Immutable after construction.
struct ThresholdSpec {
    ProblemParams params;
    double alpha_roro = 1.0;     // ratio >= 1
    double coefficient_c = 0.0;  // <= 0; strictly negative unless p_min = p_max
};

ThresholdSpec make_threshold_spec(const ProblemParams& params);

/// Threshold price at utilization w in [0, 1]; strictly decreasing in w
/// (constant when p_min = p_max and beta = 0).
double phi(const ThresholdSpec& spec, double w);

/// Inverse of phi on its range [p_min + beta, p_max/alpha + beta].
/// Throws validation_error for y outside the range.
double phi_inverse(const ThresholdSpec& spec, double y);

/// Closed-form integral of phi over [a, b] within [0, 1].
double phi_integral(const ThresholdSpec& spec, double a, double b);

/// Exact minimizer over x in [0, cap] of the single-step pseudo-cost
///
///   price * x + beta * |x - x_prev| - integral of phi over [w_prev, w_prev + x].
///
/// The objective is convex and piecewise smooth; the minimum is attained at
/// one of {0, cap, x_prev, phi_inverse(price + beta) - w_prev,
/// phi_inverse(price - beta) - w_prev} (inverse candidates only when
/// admissible). Ties break toward the smallest x.
double pseudo_cost_step(const ThresholdSpec& spec, double price, double x_prev, double w_prev,
                        double cap);

}  // namespace sasp
