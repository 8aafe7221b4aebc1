#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mic/basis.hpp"
#include "mic/checkerboard.hpp"
#include "test_util.hpp"

using namespace mic;

TEST_CASE("uniform has zero coordinates") {
    for (int n : {2, 3, 7}) {
        const auto c = to_coordinates(CheckerboardCopula::uniform(n));
        CHECK(c.c.cwiseAbs().maxCoeff() < 1e-15);
        const auto back = to_copula(c);
        CHECK((back.matrix() - CheckerboardCopula::uniform(n).matrix()).cwiseAbs().maxCoeff() <
              1e-15);
    }
}

TEST_CASE("comonotone coordinates follow min(i,j)(n - max(i,j))/n^2") {
    for (int n = 2; n <= 10; ++n) {
        const auto c = to_coordinates(CheckerboardCopula::comonotone(n));
        for (int i = 1; i <= n - 1; ++i) {
            for (int j = 1; j <= n - 1; ++j) {
                const double expected =
                    static_cast<double>(std::min(i, j)) * (n - std::max(i, j)) /
                    (static_cast<double>(n) * n);
                CHECK(c.c(i - 1, j - 1) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("round trip is the identity") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 14);
        const auto p = mic::test::random_positive_copula(n, rng);
        const auto back = to_copula(to_coordinates(p));
        CHECK((back.matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("negative entries are rejected with their index") {
    BasisCoordinates c;
    c.n = 3;
    c.c = Eigen::MatrixXd::Zero(2, 2);
    c.c(0, 0) = 0.5;  // drives p(0,1) and p(1,0) negative
    CHECK_THROWS_WITH_AS(to_copula(c), doctest::Contains("(0,1)"), ValidationError);

    BasisCoordinates wrong;
    wrong.n = 4;
    wrong.c = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(to_copula(wrong), ValidationError);
}

TEST_CASE("3x2 expansion at the coordinate boundary") {
    // The rectangular layout is exercised as a fixed numeric case: the two
    // transfer patterns on a 3x2 grid with both coefficients at 1/6.
    const double u = 1.0 / 6;
    double p[3][2] = {{u, u}, {u, u}, {u, u}};
    const double c11 = 1.0 / 6, c21 = 1.0 / 6;
    // window (1,1)
    p[0][0] += c11; p[0][1] -= c11; p[1][0] -= c11; p[1][1] += c11;
    // window (2,1)
    p[1][0] += c21; p[1][1] -= c21; p[2][0] -= c21; p[2][1] += c21;

    const double expected[3][2] = {{1.0 / 3, 0.0}, {1.0 / 6, 1.0 / 6}, {0.0, 1.0 / 3}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) CHECK(p[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-15));

    for (int i = 0; i < 3; ++i) CHECK(p[i][0] + p[i][1] == doctest::Approx(1.0 / 3));
    for (int j = 0; j < 2; ++j)
        CHECK(p[0][j] + p[1][j] + p[2][j] == doctest::Approx(1.0 / 2));
}

TEST_CASE("symmetric 3x3 tau matches its coordinate polynomial") {
    std::mt19937_64 rng(404);
    int done = 0;
    while (done < 50) {
        // symmetric coordinates, small enough to stay feasible
        const double c11 = 0.18 * (mic::test::unit_double(rng) - 0.4);
        const double c22 = 0.18 * (mic::test::unit_double(rng) - 0.4);
        const double c12 = 0.08 * (mic::test::unit_double(rng) - 0.5);
        BasisCoordinates c;
        c.n = 3;
        c.c = Eigen::MatrixXd::Zero(2, 2);
        c.c(0, 0) = c11;
        c.c(1, 1) = c22;
        c.c(0, 1) = c12;
        c.c(1, 0) = c12;
        CheckerboardCopula p = CheckerboardCopula::uniform(3);
        try {
            p = to_copula(c);
        } catch (const ValidationError&) {
            continue;  // infeasible draw
        }
        const double expected =
            2.0 * c11 * c22 - 2.0 * c12 * c12 + (8.0 / 9.0) * (c11 + c22 + 2.0 * c12);
        CHECK(kendall_tau(p) == doctest::Approx(expected).epsilon(1e-10));
        ++done;
    }
}
