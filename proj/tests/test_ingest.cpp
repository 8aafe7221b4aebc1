#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mic/ingest.hpp"
#include "mic/stats.hpp"

using namespace mic;

namespace {

namespace fs = std::filesystem;

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "mic_ingest_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("load_prices drops missing rows and sorts") {
    const auto p = write_file("basic.csv",
                              "date,a,b\n"
                              "2020-01-03,3.0,30\n"
                              "2020-01-02,2.0,\n"
                              "2020-01-01,1.0,10\n"
                              "2020-01-04,4.0,40\n");
    const auto s = load_prices(p.string(), "a", "b");
    CHECK(s.size() == 3);
    CHECK(s.timestamps.front() == "2020-01-01");
    CHECK(s.timestamps.back() == "2020-01-04");
    CHECK(s.x == std::vector<double>{1.0, 3.0, 4.0});
    CHECK(s.y == std::vector<double>{10.0, 30.0, 40.0});
}

TEST_CASE("load_prices failure modes") {
    const auto dup = write_file("dup.csv",
                                "date,a,b\n2020-01-01,1,2\n2020-01-01,2,3\n2020-01-02,3,4\n");
    CHECK_THROWS_WITH_AS(load_prices(dup.string(), "a", "b"),
                         doctest::Contains("2020-01-01"), IoError);

    const auto badnum = write_file("badnum.csv",
                                   "date,a,b\n2020-01-01,1,2\n2020-01-02,oops,3\n2020-01-03,3,4\n");
    CHECK_THROWS_AS(load_prices(badnum.string(), "a", "b"), IoError);

    const auto baddate = write_file("baddate.csv",
                                    "date,a,b\n01/02/2020,1,2\n2020-01-02,2,3\n2020-01-03,3,4\n");
    CHECK_THROWS_AS(load_prices(baddate.string(), "a", "b"), IoError);

    const auto short_file = write_file("short.csv", "date,a,b\n2020-01-01,1,2\n2020-01-02,2,\n");
    CHECK_THROWS_WITH_AS(load_prices(short_file.string(), "a", "b"),
                         doctest::Contains("fewer than 3"), IoError);

    const auto nocol = write_file("nocol.csv", "date,a,b\n2020-01-01,1,2\n");
    CHECK_THROWS_WITH_AS(load_prices(nocol.string(), "a", "z"), doctest::Contains("'z'"),
                         IoError);
}

TEST_CASE("two-file alignment is an inner join on timestamps") {
    const auto fx = write_file("x.csv", "date,a\n2020-01-01,1\n2020-01-02,2\n2020-01-03,3\n2020-01-06,6\n");
    const auto fy = write_file("y.csv", "date,b\n2020-01-02,20\n2020-01-03,30\n2020-01-04,40\n2020-01-06,60\n");
    const auto joined = align(load_series(fx.string(), "a"), load_series(fy.string(), "b"));
    CHECK(joined.size() == 3);
    CHECK(joined.timestamps == std::vector<std::string>{"2020-01-02", "2020-01-03", "2020-01-06"});
    CHECK(joined.x == std::vector<double>{2.0, 3.0, 6.0});
    CHECK(joined.y == std::vector<double>{20.0, 30.0, 60.0});
}

TEST_CASE("log returns") {
    AlignedSeries s;
    s.timestamps = {"2020-01-01", "2020-01-02", "2020-01-03"};
    s.x = {1.0, std::exp(1.0), std::exp(1.0)};
    s.y = {4.0, 8.0, 16.0};
    const auto r = log_returns(s);
    CHECK(r.size() == 2);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.x[1] == doctest::Approx(0.0));
    CHECK(r.y[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(r.y[1] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(r.timestamps.front() == "2020-01-02");

    s.x[1] = -2.0;
    CHECK_THROWS_WITH_AS(log_returns(s), doctest::Contains("2020-01-02"), ValidationError);
}

TEST_CASE("price count 1636 yields 1635 returns") {
    std::ostringstream os;
    os << "date,a,b\n";
    double px = 100.0, py = 200.0;
    for (int k = 0; k < 1636; ++k) {
        const int year = 2017 + k / 365;
        const int day_of_year = k % 365;
        const int month = day_of_year / 31 + 1;
        const int day = day_of_year % 31 + 1;
        px *= std::exp(0.001 * std::sin(0.7 * k) + 0.0001);
        py *= std::exp(0.001 * std::cos(0.9 * k) - 0.0001);
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        os << buf << ',' << px << ',' << py << '\n';
    }
    const auto p = write_file("long.csv", os.str());
    const auto prices = load_prices(p.string(), "a", "b");
    CHECK(prices.size() == 1636);
    const auto returns = log_returns(prices);
    CHECK(returns.size() == 1635);
}

TEST_CASE("pseudo-observation transform") {
    AlignedSeries s;
    s.timestamps = {"2020-01-01", "2020-01-02", "2020-01-03", "2020-01-04"};
    s.x = {0.5, 1.5, 2.5, 9.0};
    s.y = {4.0, 3.0, 2.0, 1.0};
    const auto obs = to_pseudo_observations(s);
    CHECK(obs.u == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    CHECK(obs.v == std::vector<double>{0.875, 0.625, 0.375, 0.125});

    // rank statistics are invariant under strictly increasing transforms
    AlignedSeries t = s;
    for (auto& x : t.x) x = std::exp(3.0 * x);
    for (auto& y : t.y) y = std::atan(y);
    const auto obs_t = to_pseudo_observations(t);
    CHECK(std::abs(empirical_tau(obs) - empirical_tau(obs_t)) < 1e-15);
    CHECK(std::abs(empirical_rho(obs) - empirical_rho(obs_t)) < 1e-15);
}

TEST_CASE("pipeline determinism") {
    const std::string content =
        "date,a,b\n"
        "2021-03-01,10.5,20.25\n"
        "2021-03-02,10.7,20.5\n"
        "2021-03-03,10.2,19.75\n"
        "2021-03-04,10.9,21.0\n";
    const auto p1 = write_file("det1.csv", content);
    const auto p2 = write_file("det2.csv", content);
    const auto obs1 = to_pseudo_observations(log_returns(load_prices(p1.string(), "a", "b")));
    const auto obs2 = to_pseudo_observations(log_returns(load_prices(p2.string(), "a", "b")));
    CHECK(obs1.u == obs2.u);
    CHECK(obs1.v == obs2.v);
}
