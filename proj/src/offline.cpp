#include "sasp/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace sasp {

namespace {

// ---------------------------------------------------------------------------
// Dense primal-dual interior-point method for the chain-structured QP
//
//   min c'v + v'Qv   s.t.  a'v = 1,  G v <= h,
//
// where v = [x, s] stacks the decisions with the epigraph variables
// s_t >= |x_t - x_{t-1}| (s omitted when beta = 0), Q = diag(lambda) on the
// x block, and G collects the epigraph pairs and the box constraints.
// Rows of G have at most three nonzeros, which keeps the normal-equations
// assembly linear in the row count.
// ---------------------------------------------------------------------------

struct SparseRow {
    int idx[3];
    double val[3];
    int nnz = 0;
    double rhs = 0.0;
};

struct QpProblem {
    int n = 0;                   // variables (x block first)
    int n_x = 0;                 // decision variables
    std::vector<SparseRow> rows; // inequality rows, G v <= rhs
    Vec c;                       // linear cost
    double lambda = 0.0;         // quadratic weight on the x block
};

QpProblem build_problem(const ProblemParams& params, const Vec& prices, double lambda) {
    const int T = params.horizon;
    const bool with_switching = params.beta > 0.0;
    QpProblem qp;
    qp.n_x = T;
    qp.n = with_switching ? 2 * T + 1 : T;
    qp.lambda = lambda;
    qp.c.assign(static_cast<std::size_t>(qp.n), 0.0);
    for (int t = 0; t < T; ++t) qp.c[static_cast<std::size_t>(t)] = prices[static_cast<std::size_t>(t)];
    if (with_switching) {
        for (int t = 0; t <= T; ++t) qp.c[static_cast<std::size_t>(T + t)] = params.beta;
        // s_t >= +-(x_t - x_{t-1}) with x_{-1} = x_T = 0 (boundary convention).
        for (int t = 0; t <= T; ++t) {
            for (const double sign : {+1.0, -1.0}) {
                SparseRow row;
                if (t < T) {
                    row.idx[row.nnz] = t;
                    row.val[row.nnz++] = sign;
                }
                if (t > 0) {
                    row.idx[row.nnz] = t - 1;
                    row.val[row.nnz++] = -sign;
                }
                row.idx[row.nnz] = T + t;
                row.val[row.nnz++] = -1.0;
                row.rhs = 0.0;
                qp.rows.push_back(row);
            }
        }
    }
    for (int t = 0; t < T; ++t) {
        SparseRow upper;
        upper.idx[0] = t;
        upper.val[0] = 1.0;
        upper.nnz = 1;
        upper.rhs = params.rate_limits[static_cast<std::size_t>(t)];
        qp.rows.push_back(upper);
        SparseRow lower;
        lower.idx[0] = t;
        lower.val[0] = -1.0;
        lower.nnz = 1;
        lower.rhs = 0.0;
        qp.rows.push_back(lower);
    }
    return qp;
}

// In-place Cholesky of the lower triangle; returns false on a non-positive pivot.
bool cholesky(std::vector<double>& m, int n) {
    for (int j = 0; j < n; ++j) {
        double diag = m[static_cast<std::size_t>(j * n + j)];
        for (int k = 0; k < j; ++k) {
            const double l = m[static_cast<std::size_t>(j * n + k)];
            diag -= l * l;
        }
        if (!(diag > 0.0)) return false;
        const double root = std::sqrt(diag);
        m[static_cast<std::size_t>(j * n + j)] = root;
        for (int i = j + 1; i < n; ++i) {
            double v = m[static_cast<std::size_t>(i * n + j)];
            for (int k = 0; k < j; ++k) {
                v -= m[static_cast<std::size_t>(i * n + k)] * m[static_cast<std::size_t>(j * n + k)];
            }
            m[static_cast<std::size_t>(i * n + j)] = v / root;
        }
    }
    return true;
}

void cholesky_solve(const std::vector<double>& l, int n, Vec& x) {
    for (int i = 0; i < n; ++i) {
        double v = x[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) v -= l[static_cast<std::size_t>(i * n + k)] * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i * n + i)];
    }
    for (int i = n - 1; i >= 0; --i) {
        double v = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) v -= l[static_cast<std::size_t>(k * n + i)] * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i * n + i)];
    }
}

struct IpmResult {
    Vec x;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

IpmResult solve_qp(const QpProblem& qp, const ProblemParams& params) {
    const int n = qp.n;
    const int n_x = qp.n_x;
    const int m = static_cast<int>(qp.rows.size());
    const double c_scale = std::max(1.0, params.p_max);

    // Strictly interior start: decisions proportional to capacity, epigraph
    // variables above the implied differences, slacks floored away from zero.
    Vec v(static_cast<std::size_t>(n), 0.0);
    double capacity = 0.0;
    for (int t = 0; t < n_x; ++t) capacity += params.rate_limits[static_cast<std::size_t>(t)];
    for (int t = 0; t < n_x; ++t) {
        const double d = params.rate_limits[static_cast<std::size_t>(t)];
        v[static_cast<std::size_t>(t)] = std::clamp(d / capacity, 0.05 * d, 0.95 * d);
    }
    for (int i = n_x; i < n; ++i) v[static_cast<std::size_t>(i)] = 1.0;

    Vec sl(static_cast<std::size_t>(m), 0.0), zl(static_cast<std::size_t>(m), 0.0);
    const auto row_dot = [&](const SparseRow& row, const Vec& vec) {
        double acc = 0.0;
        for (int k = 0; k < row.nnz; ++k) acc += row.val[k] * vec[static_cast<std::size_t>(row.idx[k])];
        return acc;
    };
    for (int r = 0; r < m; ++r) {
        sl[static_cast<std::size_t>(r)] = std::max(0.1, qp.rows[static_cast<std::size_t>(r)].rhs - row_dot(qp.rows[static_cast<std::size_t>(r)], v));
        zl[static_cast<std::size_t>(r)] = 0.1 * c_scale;
    }
    double y = 0.0;

    Vec r_d(static_cast<std::size_t>(n)), r_g(static_cast<std::size_t>(m));
    Vec rhs_v(static_cast<std::size_t>(n)), u1(static_cast<std::size_t>(n)), u2(static_cast<std::size_t>(n));
    Vec dv(static_cast<std::size_t>(n)), dsl(static_cast<std::size_t>(m)), dzl(static_cast<std::size_t>(m));
    Vec dsl_aff(static_cast<std::size_t>(m)), dzl_aff(static_cast<std::size_t>(m));
    Vec rhs_c(static_cast<std::size_t>(m)), d_scaling(static_cast<std::size_t>(m));
    std::vector<double> mat(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));

    IpmResult best;
    best.x.assign(static_cast<std::size_t>(n_x), 0.0);
    double best_merit = std::numeric_limits<double>::infinity();
    double mu = 1.0;
    int stall = 0;

    const double tol_p = 1e-11;
    const double tol_d = 1e-10 * c_scale;
    const double tol_mu = 1e-11 * c_scale;
    const int max_iterations = 200;

    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        // Residuals.
        double r_p = -1.0;
        for (int t = 0; t < n_x; ++t) r_p += v[static_cast<std::size_t>(t)];
        for (int i = 0; i < n; ++i) {
            r_d[static_cast<std::size_t>(i)] = qp.c[static_cast<std::size_t>(i)] +
                (i < n_x ? 2.0 * qp.lambda * v[static_cast<std::size_t>(i)] + y : 0.0);
        }
        double primal_inf = std::fabs(r_p);
        for (int r = 0; r < m; ++r) {
            const SparseRow& row = qp.rows[static_cast<std::size_t>(r)];
            const double gv = row_dot(row, v);
            r_g[static_cast<std::size_t>(r)] = gv + sl[static_cast<std::size_t>(r)] - row.rhs;
            primal_inf = std::max(primal_inf, std::max(0.0, gv - row.rhs));
            for (int k = 0; k < row.nnz; ++k) {
                r_d[static_cast<std::size_t>(row.idx[k])] += row.val[k] * zl[static_cast<std::size_t>(r)];
            }
        }
        double dual_inf = 0.0;
        for (int i = 0; i < n; ++i) dual_inf = std::max(dual_inf, std::fabs(r_d[static_cast<std::size_t>(i)]));
        mu = 0.0;
        for (int r = 0; r < m; ++r) mu += sl[static_cast<std::size_t>(r)] * zl[static_cast<std::size_t>(r)];
        mu /= static_cast<double>(m);

        const double merit = primal_inf + dual_inf / c_scale + mu / c_scale;
        if (merit < best_merit) {
            best_merit = merit;
            std::copy(v.begin(), v.begin() + n_x, best.x.begin());
            best.residual = std::max({primal_inf, dual_inf / c_scale, mu / c_scale});
            stall = 0;
        } else if (++stall > 12) {
            break;  // no progress; return the best iterate seen
        }
        if (primal_inf <= tol_p && dual_inf <= tol_d && mu <= tol_mu) {
            best.converged = true;
            break;
        }

        // Normal matrix M = Q + G' D G + delta I.
        for (int r = 0; r < m; ++r) {
            d_scaling[static_cast<std::size_t>(r)] = zl[static_cast<std::size_t>(r)] / sl[static_cast<std::size_t>(r)];
        }
        double delta = 1e-13 * c_scale;
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::fill(mat.begin(), mat.end(), 0.0);
            for (int i = 0; i < n_x; ++i) mat[static_cast<std::size_t>(i * n + i)] = 2.0 * qp.lambda;
            for (int r = 0; r < m; ++r) {
                const SparseRow& row = qp.rows[static_cast<std::size_t>(r)];
                const double d = d_scaling[static_cast<std::size_t>(r)];
                for (int a = 0; a < row.nnz; ++a) {
                    for (int b = 0; b < row.nnz; ++b) {
                        if (row.idx[a] >= row.idx[b]) {
                            mat[static_cast<std::size_t>(row.idx[a] * n + row.idx[b])] +=
                                d * row.val[a] * row.val[b];
                        }
                    }
                }
            }
            for (int i = 0; i < n; ++i) mat[static_cast<std::size_t>(i * n + i)] += delta;
            if (cholesky(mat, n)) break;
            delta *= 1e3;
        }

        const auto solve_step = [&](bool corrector) -> double {
            // rhs_v = -r_d - G' (D r_g + rhs_c / sl)
            for (int i = 0; i < n; ++i) rhs_v[static_cast<std::size_t>(i)] = -r_d[static_cast<std::size_t>(i)];
            for (int r = 0; r < m; ++r) {
                const SparseRow& row = qp.rows[static_cast<std::size_t>(r)];
                const double w = d_scaling[static_cast<std::size_t>(r)] * r_g[static_cast<std::size_t>(r)] +
                                 rhs_c[static_cast<std::size_t>(r)] / sl[static_cast<std::size_t>(r)];
                for (int k = 0; k < row.nnz; ++k) {
                    rhs_v[static_cast<std::size_t>(row.idx[k])] -= row.val[k] * w;
                }
            }
            u1 = rhs_v;
            cholesky_solve(mat, n, u1);
            std::fill(u2.begin(), u2.end(), 0.0);
            for (int t = 0; t < n_x; ++t) u2[static_cast<std::size_t>(t)] = 1.0;
            cholesky_solve(mat, n, u2);
            double a_u1 = 0.0, a_u2 = 0.0;
            for (int t = 0; t < n_x; ++t) {
                a_u1 += u1[static_cast<std::size_t>(t)];
                a_u2 += u2[static_cast<std::size_t>(t)];
            }
            const double dy = (a_u1 + r_p) / a_u2;
            for (int i = 0; i < n; ++i) {
                dv[static_cast<std::size_t>(i)] = u1[static_cast<std::size_t>(i)] - dy * u2[static_cast<std::size_t>(i)];
            }
            for (int r = 0; r < m; ++r) {
                const SparseRow& row = qp.rows[static_cast<std::size_t>(r)];
                const double g_dv = row_dot(row, dv);
                dzl[static_cast<std::size_t>(r)] =
                    d_scaling[static_cast<std::size_t>(r)] * (g_dv + r_g[static_cast<std::size_t>(r)]) +
                    rhs_c[static_cast<std::size_t>(r)] / sl[static_cast<std::size_t>(r)];
                dsl[static_cast<std::size_t>(r)] = -r_g[static_cast<std::size_t>(r)] - g_dv;
            }
            if (!corrector) {
                dsl_aff = dsl;
                dzl_aff = dzl;
            }
            return dy;
        };

        // Affine (predictor) direction.
        for (int r = 0; r < m; ++r) {
            rhs_c[static_cast<std::size_t>(r)] = -sl[static_cast<std::size_t>(r)] * zl[static_cast<std::size_t>(r)];
        }
        solve_step(false);

        const auto max_step = [&](const Vec& values, const Vec& deltas) {
            double alpha = 1.0;
            for (int r = 0; r < m; ++r) {
                if (deltas[static_cast<std::size_t>(r)] < 0.0) {
                    alpha = std::min(alpha, -values[static_cast<std::size_t>(r)] / deltas[static_cast<std::size_t>(r)]);
                }
            }
            return alpha;
        };
        const double alpha_p_aff = max_step(sl, dsl_aff);
        const double alpha_d_aff = max_step(zl, dzl_aff);
        double mu_aff = 0.0;
        for (int r = 0; r < m; ++r) {
            mu_aff += (sl[static_cast<std::size_t>(r)] + alpha_p_aff * dsl_aff[static_cast<std::size_t>(r)]) *
                      (zl[static_cast<std::size_t>(r)] + alpha_d_aff * dzl_aff[static_cast<std::size_t>(r)]);
        }
        mu_aff /= static_cast<double>(m);
        const double sigma = std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), 3.0);

        // Corrector direction with centering.
        for (int r = 0; r < m; ++r) {
            rhs_c[static_cast<std::size_t>(r)] =
                -sl[static_cast<std::size_t>(r)] * zl[static_cast<std::size_t>(r)] -
                dsl_aff[static_cast<std::size_t>(r)] * dzl_aff[static_cast<std::size_t>(r)] + sigma * mu;
        }
        const double dy = solve_step(true);

        const double fraction = mu > 1e-8 * c_scale ? 0.995 : 0.9995;
        const double alpha_p = std::min(1.0, fraction * max_step(sl, dsl));
        const double alpha_d = std::min(1.0, fraction * max_step(zl, dzl));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] += alpha_p * dv[static_cast<std::size_t>(i)];
        for (int r = 0; r < m; ++r) {
            sl[static_cast<std::size_t>(r)] = std::max(1e-300, sl[static_cast<std::size_t>(r)] + alpha_p * dsl[static_cast<std::size_t>(r)]);
            zl[static_cast<std::size_t>(r)] = std::max(1e-300, zl[static_cast<std::size_t>(r)] + alpha_d * dzl[static_cast<std::size_t>(r)]);
        }
        y += alpha_d * dy;
    }

    best.iterations = iter;
    return best;
}

// Snaps an epsilon-feasible iterate to exact feasibility: clamp to the box,
// then spread the budget residual over slots with remaining room.
Vec snap_feasible(const ProblemParams& params, Vec x) {
    const auto T = x.size();
    for (std::size_t t = 0; t < T; ++t) {
        x[t] = std::clamp(x[t], 0.0, params.rate_limits[t]);
    }
    for (int pass = 0; pass < 3; ++pass) {
        double total = 0.0;
        for (const double v : x) total += v;
        const double residual = 1.0 - total;
        if (std::fabs(residual) <= 1e-15) break;
        if (residual > 0.0) {
            double room = 0.0;
            for (std::size_t t = 0; t < T; ++t) room += params.rate_limits[t] - x[t];
            if (room <= 0.0) break;
            for (std::size_t t = 0; t < T; ++t) {
                x[t] += residual * (params.rate_limits[t] - x[t]) / room;
            }
        } else {
            double mass = 0.0;
            for (const double v : x) mass += v;
            for (std::size_t t = 0; t < T; ++t) {
                x[t] = std::max(0.0, x[t] + residual * x[t] / mass);
            }
        }
    }
    // Dump any remaining machine-epsilon residual on the slot with most slack.
    double total = 0.0;
    for (const double v : x) total += v;
    double residual = 1.0 - total;
    if (residual != 0.0) {
        std::size_t slot = 0;
        double best_room = -1.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double room = residual > 0.0 ? params.rate_limits[t] - x[t] : x[t];
            if (room > best_room) {
                best_room = room;
                slot = t;
            }
        }
        x[slot] = std::clamp(x[slot] + residual, 0.0, params.rate_limits[slot]);
    }
    return x;
}

SolveReport solve_with_lambda(const ProblemParams& params, const Vec& prices, double lambda) {
    params.validate();
    if (prices.size() != static_cast<std::size_t>(params.horizon)) {
        throw validation_error("solve_opt: price vector length does not match horizon");
    }
    for (std::size_t t = 0; t < prices.size(); ++t) {
        if (!std::isfinite(prices[t]) || prices[t] < params.p_min - 1e-9 ||
            prices[t] > params.p_max + 1e-9) {
            std::ostringstream msg;
            msg << "solve_opt: price p[" << t << "] = " << prices[t]
                << " outside the admissible band";
            throw validation_error(msg.str());
        }
    }

    SolveReport report;
    double capacity = 0.0;
    for (const double d : params.rate_limits) capacity += d;
    if (capacity <= 1.0 + 1e-12 || params.horizon == 1) {
        // Degenerate feasible set: the rate limits leave no slack, so the
        // unique schedule takes every slot at capacity (scaled when the total
        // marginally exceeds one).
        Vec x = params.rate_limits;
        for (double& v : x) v /= capacity;
        report.schedule = Schedule::from_decisions(snap_feasible(params, std::move(x)));
        report.iterations = 0;
        report.residual = 0.0;
    } else {
        const QpProblem qp = build_problem(params, prices, lambda);
        IpmResult result = solve_qp(qp, params);
        const double loose = kOptTolerance * std::max(1.0, params.p_max);
        if (!result.converged && result.residual > loose) {
            throw solver_error("solve_opt: interior-point iteration did not converge",
                               result.residual, result.x);
        }
        report.schedule = Schedule::from_decisions(snap_feasible(params, std::move(result.x)));
        report.iterations = result.iterations;
        report.residual = result.residual;
    }
    report.cost = evaluate_cost_unchecked(params, prices, report.schedule.decisions);
    return report;
}

}  // namespace

SolveReport solve_opt(const ProblemParams& params, const Vec& prices) {
    return solve_with_lambda(params, prices, params.lambda_reg);
}

SolveReport opt_deterministic_tiebreak(const ProblemParams& params, const Vec& prices) {
    if (params.lambda_reg > 0.0) return solve_opt(params, prices);
    SolveReport report = solve_with_lambda(params, prices, 1e-9 * params.p_max);
    // Costs are reported under the caller's lambda (zero); the internal
    // regularizer only selects among optima.
    report.cost = evaluate_cost_unchecked(params, prices, report.schedule.decisions);
    return report;
}

SolveReport brute_force_opt(const ProblemParams& params, const Vec& prices, double grid_step) {
    params.validate();
    if (params.horizon > 4) {
        throw validation_error("brute_force_opt: horizon must be <= 4");
    }
    if (prices.size() != static_cast<std::size_t>(params.horizon)) {
        throw validation_error("brute_force_opt: price vector length does not match horizon");
    }
    if (!(grid_step > 0.0) || grid_step > 1.0) {
        throw validation_error("brute_force_opt: grid_step must lie in (0, 1]");
    }
    const auto steps = static_cast<long>(std::llround(1.0 / grid_step));
    if (std::fabs(static_cast<double>(steps) * grid_step - 1.0) > 1e-9) {
        throw validation_error("brute_force_opt: grid_step must divide 1 evenly");
    }

    const int T = params.horizon;
    Vec x(static_cast<std::size_t>(T), 0.0);
    Vec best_x;
    double best_cost = std::numeric_limits<double>::infinity();
    long evaluations = 0;

    // Enumerate the first T-1 coordinates on the grid; the last coordinate is
    // the on-grid remainder.
    const auto recurse = [&](const auto& self, int t, long used) -> void {
        if (t == T - 1) {
            const long remaining = steps - used;
            const double last = static_cast<double>(remaining) * grid_step;
            if (remaining < 0 || last > params.rate_limits[static_cast<std::size_t>(t)] + 1e-12) {
                return;
            }
            x[static_cast<std::size_t>(t)] = std::min(last, params.rate_limits[static_cast<std::size_t>(t)]);
            ++evaluations;
            const CostBreakdown cost = evaluate_cost_unchecked(params, prices, x);
            if (cost.total < best_cost) {
                best_cost = cost.total;
                best_x = x;
            }
            return;
        }
        const long cap = std::min(
            steps - used,
            static_cast<long>(std::floor(params.rate_limits[static_cast<std::size_t>(t)] / grid_step + 1e-12)));
        for (long k = 0; k <= cap; ++k) {
            x[static_cast<std::size_t>(t)] = static_cast<double>(k) * grid_step;
            self(self, t + 1, used + k);
        }
    };
    recurse(recurse, 0, 0);

    if (best_x.empty()) {
        throw validation_error("brute_force_opt: no grid-feasible schedule found");
    }
    SolveReport report;
    report.schedule = Schedule::from_decisions(snap_feasible(params, std::move(best_x)));
    report.cost = evaluate_cost_unchecked(params, prices, report.schedule.decisions);
    report.iterations = static_cast<int>(std::min<long>(evaluations, std::numeric_limits<int>::max()));
    report.residual = 0.0;
    return report;
}

}  // namespace sasp
