#include <catch2/catch_amalgamated.hpp>

#include "latmom/stats.hpp"

using namespace latmom;

TEST_CASE("pairwise sum matches exact rational cases") {
    std::vector<double> xs(1000, 0.1);
    CHECK(pairwise_sum(xs) == Catch::Approx(100.0).epsilon(1e-13));
    std::vector<double> ys = {1e16, 1.0, -1e16, 1.0};
    CHECK(pairwise_sum(ys) >= 0.0);
}

TEST_CASE("mean and stderr") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
    auto ms = mean_and_stderr(xs);
    CHECK(ms.mean == Catch::Approx(3.0));
    CHECK(ms.variance == Catch::Approx(2.5));
    CHECK(ms.stderr_ == Catch::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(mean_and_stderr(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("chi-squared survival function against table values") {
    CHECK(chi_squared_sf(3.841458820694124, 1) == Catch::Approx(0.05).epsilon(1e-6));
    CHECK(chi_squared_sf(11.070497693516351, 5) == Catch::Approx(0.05).epsilon(1e-6));
    CHECK(chi_squared_sf(15.086272469388988, 5) == Catch::Approx(0.01).epsilon(1e-6));
    CHECK(chi_squared_sf(0.0, 5) == Catch::Approx(1.0));
}

TEST_CASE("kolmogorov-smirnov statistic on exact uniform grid") {
    // CDF(x) = x on [0,1]; the grid {0.5/n, 1.5/n, ...} has D = 0.5/n.
    const int n = 100;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back((i + 0.5) / n);
    double d = ks_statistic(xs, [](double x) { return x; });
    CHECK(d == Catch::Approx(0.005).epsilon(1e-9));
    CHECK(ks_critical(1e-3, 1000000) == Catch::Approx(std::sqrt(-0.5 * std::log(5e-4)) / 1000.0));
}
