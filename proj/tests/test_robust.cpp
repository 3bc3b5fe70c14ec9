#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sasp/robust.hpp"
#include "sasp/rng.hpp"

using namespace sasp;

TEST_CASE("lambert_w0 fixed points") {
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
    // Omega constant, frozen from the bisection oracle.
    CHECK(lambert_w0(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-13));
    CHECK(lambert_w0(1.0) == doctest::Approx(oracles::lambert_w0_bisect(1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(lambert_w0(-0.4), std::domain_error);
}

TEST_CASE("lambert_w0 defining equation over the working range") {
    CounterRng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        double x;
        switch (trial % 3) {
            case 0: x = rng.uniform(-std::exp(-1.0), 0.0); break;
            case 1: x = rng.uniform(0.0, 3.0); break;
            default: x = rng.uniform(3.0, 1e6); break;
        }
        const double w = lambert_w0(x);
        CHECK(std::fabs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::fabs(x)));
        CHECK(w >= -1.0);
    }
}

TEST_CASE("alpha_roro closed form matches the fixed-point oracle") {
    // Degenerate band: ratio 1.
    CHECK(alpha_roro(ProblemParams::uniform(100.0, 100.0, 0.0, 0.0, 2)) == doctest::Approx(1.0));

    // Frozen oracle values.
    CHECK(alpha_roro(ProblemParams::uniform(100.0, 400.0, 0.0, 0.0, 8)) ==
          doctest::Approx(1.7237474159801891).epsilon(1e-11));
    CHECK(alpha_roro(ProblemParams::uniform(59.33, 338.63, 20.0, 0.0, 8)) ==
          doctest::Approx(2.4070981071100016).epsilon(1e-11));

    CounterRng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto params = oracles::random_params(rng, 8, 0.0);
        const double alpha = alpha_roro(params);
        CHECK(alpha >= 1.0);
        CHECK(alpha ==
              doctest::Approx(oracles::alpha_roro_bisect(params.p_min, params.p_max, params.beta))
                  .epsilon(1e-9));
    }
}

TEST_CASE("alpha_roro grows with the band ratio and with beta") {
    const double base = alpha_roro(ProblemParams::uniform(100.0, 400.0, 0.0, 0.0, 8));
    CHECK(alpha_roro(ProblemParams::uniform(100.0, 800.0, 0.0, 0.0, 8)) >= base);
    CHECK(alpha_roro(ProblemParams::uniform(100.0, 400.0, 40.0, 0.0, 8)) >= base);

    CounterRng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const double p_min = rng.uniform(20.0, 200.0);
        const double band = p_min * rng.uniform(0.5, 10.0);
        const double beta1 = rng.uniform(0.0, 0.4 * band);
        const double beta2 = rng.uniform(beta1, 0.45 * band);
        const double a1 = alpha_roro(ProblemParams::uniform(p_min, p_min + band, beta1, 0.0, 8));
        const double a2 = alpha_roro(ProblemParams::uniform(p_min, p_min + band, beta2, 0.0, 8));
        CHECK(a2 >= a1 - 1e-9);
    }
}

TEST_CASE("alpha_sasp reduces to alpha_roro at lambda 0 and shifts with lambda") {
    const auto params = ProblemParams::uniform(100.0, 400.0, 20.0, 0.0, 8);
    CHECK(alpha_sasp(params) == alpha_roro(params));
    CHECK(alpha_sasp(ProblemParams::uniform(100.0, 100.0, 0.0, 0.0, 4)) == doctest::Approx(1.0));

    auto regularized = params;
    regularized.lambda_reg = 10.0;
    const double alpha = alpha_roro(regularized);
    const double expected = 8.0 * (alpha * 100.0 + 10.0) / (8.0 * 100.0 + 10.0);
    CHECK(alpha_sasp(regularized) == doctest::Approx(expected).epsilon(1e-12));
    // Frozen from the oracle chain: alpha(100,400,20) = 1.9628181173567661.
    CHECK(alpha_sasp(regularized) == doctest::Approx(2.0373512270190282).epsilon(1e-11));
}

TEST_CASE("phi endpoints and monotonicity") {
    CounterRng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto params = oracles::random_params(rng, 8, 0.0);
        const ThresholdSpec spec = make_threshold_spec(params);
        CHECK(spec.coefficient_c <= 1e-12);

        const double at_zero = phi(spec, 0.0);
        const double at_one = phi(spec, 1.0);
        CHECK(at_zero ==
              doctest::Approx(params.p_max / spec.alpha_roro + params.beta).epsilon(1e-9));
        CHECK(at_one == doctest::Approx(params.p_min + params.beta).epsilon(1e-9));
        double prev = at_zero;
        for (double w = 0.05; w <= 1.0; w += 0.05) {
            const double value = phi(spec, w);
            if (params.p_min < params.p_max) CHECK(value < prev);
            prev = value;
        }
    }
    const ThresholdSpec degenerate =
        make_threshold_spec(ProblemParams::uniform(250.0, 250.0, 0.0, 0.0, 4));
    CHECK(phi(degenerate, 0.0) == doctest::Approx(250.0));
    CHECK(phi(degenerate, 0.7) == doctest::Approx(250.0));
    CHECK_THROWS_AS(phi(degenerate, 1.5), validation_error);
}

TEST_CASE("phi_inverse round trips") {
    const ThresholdSpec spec =
        make_threshold_spec(ProblemParams::uniform(100.0, 400.0, 20.0, 0.0, 8));
    CHECK(phi_inverse(spec, phi(spec, 0.0)) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(phi_inverse(spec, spec.params.p_min + spec.params.beta) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(phi_inverse(spec, phi(spec, 0.5)) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(phi(spec, phi_inverse(spec, 200.0)) == doctest::Approx(200.0).epsilon(1e-9));
    CHECK_THROWS_AS(phi_inverse(spec, 1000.0), validation_error);
    CHECK_THROWS_AS(phi_inverse(spec, 10.0), validation_error);
}

TEST_CASE("phi_integral matches quadrature") {
    const ThresholdSpec spec =
        make_threshold_spec(ProblemParams::uniform(100.0, 400.0, 20.0, 0.0, 8));
    CHECK(phi_integral(spec, 0.3, 0.3) == 0.0);
    // Frozen from the quadrature oracle.
    CHECK(phi_integral(spec, 0.0, 0.3) == doctest::Approx(63.36560089156199).epsilon(1e-10));

    const ThresholdSpec constant =
        make_threshold_spec(ProblemParams::uniform(250.0, 250.0, 0.0, 0.0, 4));
    CHECK(phi_integral(constant, 0.0, 1.0) == doctest::Approx(250.0));

    CounterRng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto params = oracles::random_params(rng, 8, 0.0);
        const ThresholdSpec random_spec = make_threshold_spec(params);
        const double a = rng.next_unit();
        const double b = a + (1.0 - a) * rng.next_unit();
        const double closed = phi_integral(random_spec, a, b);
        const double numeric =
            oracles::integrate([&](double w) { return phi(random_spec, w); }, a, b);
        CHECK(closed == doctest::Approx(numeric).epsilon(1e-9));
    }
}

TEST_CASE("balance identity holds for all utilizations") {
    CounterRng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const auto params = oracles::random_params(rng, 8, 0.0);
        const ThresholdSpec spec = make_threshold_spec(params);
        for (double w = 0.0; w <= 1.0 + 1e-12; w += 0.01) {
            const double lhs = phi_integral(spec, 0.0, std::min(w, 1.0)) + params.beta * w +
                               (1.0 - w) * params.p_max;
            const double rhs = spec.alpha_roro * (phi(spec, std::min(w, 1.0)) - params.beta);
            CHECK(std::fabs(lhs - rhs) <= 1e-8 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)}));
        }
    }
}

TEST_CASE("pseudo_cost_step boundary regimes") {
    const auto params = ProblemParams::uniform(100.0, 400.0, 20.0, 0.0, 8);
    const ThresholdSpec spec = make_threshold_spec(params);

    // Price too high: buy nothing.
    CHECK(pseudo_cost_step(spec, phi(spec, 0.2) - params.beta + 1.0, 0.0, 0.2, 0.8) == 0.0);
    // Price low enough everywhere: take the cap.
    CHECK(pseudo_cost_step(spec, params.p_min, 0.0, 0.2, 0.3) == doctest::Approx(0.3));
    // Interior: land exactly on the threshold crossing; frozen from the
    // 4e5-point grid oracle (argmin 0.078223, objective agreement 1e-6).
    const double interior = pseudo_cost_step(spec, 180.0, 0.0, 0.2, 0.8);
    CHECK(interior == doctest::Approx(0.0782231393689934).epsilon(1e-9));
}

TEST_CASE("pseudo_cost_step matches a dense grid scan") {
    CounterRng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto params = oracles::random_params(rng, 8, 0.0);
        const ThresholdSpec spec = make_threshold_spec(params);
        const double w_prev = rng.next_unit();
        const double cap = (1.0 - w_prev) * rng.next_unit();
        const double x_prev = rng.next_unit();
        const double price = rng.uniform(params.p_min, params.p_max);

        const auto objective = [&](double x) {
            return price * x + params.beta * std::fabs(x - x_prev) -
                   phi_integral(spec, w_prev, std::min(1.0, w_prev + x));
        };
        const double chosen = pseudo_cost_step(spec, price, x_prev, w_prev, cap);
        CHECK(chosen >= 0.0);
        CHECK(chosen <= cap + 1e-12);
        const auto [grid_x, grid_min] = oracles::grid_scan_min(objective, 0.0, cap, 10001);
        (void)grid_x;
        CHECK(objective(chosen) <= grid_min + 1e-6);
    }
}

TEST_CASE("pseudo_cost_step is monotone non-increasing in price") {
    CounterRng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const auto params = oracles::random_params(rng, 8, 0.0);
        const ThresholdSpec spec = make_threshold_spec(params);
        const double w_prev = 0.8 * rng.next_unit();
        const double cap = (1.0 - w_prev) * rng.next_unit();
        const double x_prev = rng.next_unit();
        const double p1 = rng.uniform(params.p_min, params.p_max);
        const double p2 = rng.uniform(p1, params.p_max);
        CHECK(pseudo_cost_step(spec, p2, x_prev, w_prev, cap) <=
              pseudo_cost_step(spec, p1, x_prev, w_prev, cap) + 1e-9);
    }
}
