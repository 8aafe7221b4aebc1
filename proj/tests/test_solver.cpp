#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mic/diagnostics.hpp"
#include "mic/solver.hpp"
#include "test_util.hpp"

using namespace mic;

TEST_CASE("window_delta solves the defining equation") {
    // already satisfied: K = 1 and ad = bc
    CHECK(window_delta(0.1, 0.2, 0.05, 0.1, 0.0, OddsKind::plain) == doctest::Approx(0.0));

    // uniform window with positive ratio moves mass toward the diagonal
    {
        const double p = 1.0 / 25;
        const double d = window_delta(p, p, p, p, 2.0, OddsKind::pseudo);
        CHECK(d > 0.0);
        const double lo = std::log(p + d) + std::log(p + d) - std::log(p - d) - std::log(p - d);
        CHECK(lo / (4 * p) == doctest::Approx(2.0).epsilon(1e-12));
    }

    // random positive windows: substitute back, both kinds
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = 0.01 + mic::test::unit_double(rng);
        const double b = 0.01 + mic::test::unit_double(rng);
        const double c = 0.01 + mic::test::unit_double(rng);
        const double d = 0.01 + mic::test::unit_double(rng);
        const double r = 6.0 * (mic::test::unit_double(rng) - 0.5);
        const OddsKind kind = (trial % 2) ? OddsKind::pseudo : OddsKind::plain;
        const double delta = window_delta(a, b, c, d, r, kind);
        CHECK(delta > -std::min(a, d));
        CHECK(delta < std::min(b, c));
        double achieved = std::log(a + delta) + std::log(d + delta) -
                          std::log(b - delta) - std::log(c - delta);
        if (kind == OddsKind::pseudo) achieved /= a + b + c + d;
        CHECK(achieved == doctest::Approx(r).epsilon(1e-12));
    }

    // zero anti-diagonal entries still admit a root when the diagonal is positive
    {
        const double d = window_delta(0.0, 0.02, 0.03, 0.04, 1.5, OddsKind::pseudo);
        CHECK(d > 0.0);
    }
    CHECK_THROWS_AS(window_delta(0.0, 0.0, 0.0, 0.0, 1.0, OddsKind::pseudo), ValidationError);
    CHECK_THROWS_AS(window_delta(-0.1, 0.2, 0.2, 0.2, 1.0, OddsKind::plain), ValidationError);
}

TEST_CASE("ratio zero returns the uniform copula without sweeping") {
    for (int n : {2, 5, 30}) {
        SolverConfig cfg;
        const auto mick = solve_mick(n, cfg);
        CHECK(mick.sweeps_used == 0);
        CHECK(mick.converged);
        CHECK((mick.copula.matrix().array() - 1.0 / (n * n)).abs().maxCoeff() == 0.0);
        const auto mics = solve_mics(n, cfg);
        CHECK(mics.sweeps_used == 0);
        CHECK(std::abs(mics.tau) < 1e-14);
    }
}

TEST_CASE("converged solves satisfy the constant-ratio characterization") {
    SolverConfig cfg;
    cfg.ratio = 3.0;
    const auto rep = solve_mick(30, cfg);
    CHECK(rep.converged);
    CHECK(rep.final_residual < cfg.tol);

    // independent audit of the solver post-condition
    const auto audit = ratio_constancy(rep.copula, OddsKind::pseudo);
    CHECK(audit.mean_ratio == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(audit.max_deviation < 1e-8);

    // margins survive thousands of in-place updates
    for (int i = 0; i < 30; ++i) {
        CHECK(std::abs(rep.copula.matrix().row(i).sum() - 1.0 / 30) < 1e-14);
        CHECK(std::abs(rep.copula.matrix().col(i).sum() - 1.0 / 30) < 1e-14);
    }

    // the uniform start and symmetric updates keep the solution symmetric
    CHECK((rep.copula.matrix() - rep.copula.matrix().transpose()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("table anchor rows") {
    SolverConfig cfg;
    cfg.ratio = 3.0;
    const auto mick3 = solve_mick(30, cfg);
    CHECK(std::abs(mick3.tau - 0.511) < 0.005);
    CHECK(std::abs(mick3.rho - 0.707) < 0.005);
    CHECK(std::abs(mick3.information - (-6.468)) < 0.01);

    cfg.ratio = 2.9;
    CHECK(std::abs(solve_mick(30, cfg).tau - 0.5) < 0.005);

    cfg.ratio = 0.01;
    const auto mics1 = solve_mics(30, cfg);
    CHECK(std::abs(mics1.rho - 0.552) < 0.005);
    CHECK(std::abs(mics1.tau - 0.380) < 0.005);
    CHECK(std::abs(mics1.information - (-6.626)) < 0.01);

    cfg.ratio = 0.05;
    const auto mics5 = solve_mics(30, cfg);
    CHECK(std::abs(mics5.rho - 0.885) < 0.005);
    CHECK(std::abs(mics5.tau - 0.689) < 0.005);
}

TEST_CASE("solved MICS matches the exponential-family closed form") {
    // Constant log odds r' forces p_ij = A_i B_j exp(r' i j); rescaling the
    // kernel to doubly stochastic margins is an independent route.
    const int n = 12;
    const double rp = 0.05;
    SolverConfig cfg;
    cfg.ratio = rp;
    const auto rep = solve_mics(n, cfg);
    CHECK(rep.converged);

    Eigen::MatrixXd kernel(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) kernel(i, j) = std::exp(rp * i * j);
    const Eigen::MatrixXd direct = fit_margins(std::move(kernel), 1e-14, 100000);
    CHECK((rep.copula.matrix() - direct).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("random sweep order reaches the same fixed point") {
    SolverConfig a;
    a.ratio = 1.5;
    SolverConfig b = a;
    b.sweep_order = SweepOrder::random_permutation;
    b.seed = 99;
    const auto ra = solve_mick(8, a);
    const auto rb = solve_mick(8, b);
    CHECK(ra.converged);
    CHECK(rb.converged);
    CHECK((ra.copula.matrix() - rb.copula.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("monotonicity of tau in the ratio") {
    SolverConfig cfg;
    double last = -1.0;
    for (double r : {0.3, 0.5, 1.0, 2.0, 3.0}) {
        cfg.ratio = r;
        const double tau = solve_mick(12, cfg).tau;
        CHECK(tau > last);
        last = tau;
    }
}

TEST_CASE("calibration") {
    SolverConfig base;

    const auto zero = calibrate(12, 0.0, Measure::kendall, Family::mick, base);
    CHECK(zero.ratio == 0.0);
    CHECK(zero.iterations == 0);

    const auto anchor = calibrate(30, 0.5, Measure::kendall, Family::mick, base);
    CHECK(std::abs(anchor.ratio - 2.9) < 0.05);
    CHECK(std::abs(anchor.achieved_correlation - 0.5) <= 1e-4);

    const auto mics = calibrate(30, 0.552, Measure::spearman, Family::mics, base);
    CHECK(std::abs(mics.ratio - 0.01) < 0.001);

    const auto neg = solve_calibrated(12, -0.4, Measure::kendall, Family::mick, base);
    CHECK(std::abs(neg.tau + 0.4) <= 1e-4);
    CHECK(neg.rho < 0.0);

    CHECK_THROWS_AS(calibrate(30, 0.97, Measure::kendall, Family::mick, base),
                    ValidationError);
    CHECK_THROWS_AS(calibrate(4, -0.999, Measure::spearman, Family::mics, base),
                    ValidationError);
}

TEST_CASE("brute-force oracle") {
    // n=2 is solvable by hand: tau = 2 c, information in closed form
    const double mu = 0.3;
    const auto bf2 = brute_force_mick(2, mu, 200, 3e-3);
    const double c = mu / 2.0;
    const double exact =
        2 * (0.25 + c) * std::log(0.25 + c) + 2 * (0.25 - c) * std::log(0.25 - c);
    CHECK(bf2.information == doctest::Approx(exact).epsilon(1e-12));
    CHECK(bf2.tau == doctest::Approx(mu).epsilon(1e-12));

    // mu = 0 keeps the uniform copula (up to grid quantization)
    const auto bf0 = brute_force_mick(3, 0.0, 60, 1e-6);
    CHECK(std::abs(bf0.tau) < 1e-6);
    CHECK(bf0.information == doctest::Approx(-2 * std::log(3.0)).epsilon(1e-3));

    // the greedy solution is never beaten beyond the band allowance: points
    // in the band sit at tau as low as mu - band, where the optimal
    // information is smaller by about lambda * band
    SolverConfig base;
    const auto greedy = solve_calibrated(3, 0.2, Measure::kendall, Family::mick, base);
    const auto bf3 = brute_force_mick(3, 0.2, 200);
    CHECK(greedy.information <= bf3.information + 1e-3);
    CHECK(std::abs(greedy.information - bf3.information) < 1e-3);

    CHECK_THROWS_AS(brute_force_mick(4, 0.1, 100), ValidationError);
    CHECK_THROWS_AS(brute_force_mick(3, 0.9, 100), ValidationError);
    // a band far finer than the grid granularity has no feasible points
    CHECK_THROWS_AS(brute_force_mick(2, 0.2951, 10, 1e-9), ValidationError);
}

TEST_CASE("non-convergence is reported, not hidden") {
    SolverConfig cfg;
    cfg.ratio = 3.0;
    cfg.max_sweeps = 3;
    const auto rep = solve_mick(30, cfg);
    CHECK_FALSE(rep.converged);
    CHECK(rep.sweeps_used == 3);
    CHECK(rep.final_residual > cfg.tol);
}

TEST_CASE("report serialization") {
    SolverConfig cfg;
    cfg.ratio = 1.0;
    const auto rep = solve_mick(5, cfg);
    const std::string text = rep.to_text();
    CHECK(text.find("ratio: 1") != std::string::npos);
    CHECK(text.find("converged: true") != std::string::npos);
    CHECK(text.find("tau: ") != std::string::npos);
}
