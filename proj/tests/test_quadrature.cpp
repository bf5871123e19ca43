#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "latmom/quadrature.hpp"

using namespace latmom::quadrature;

TEST_CASE("polynomials are exact") {
    auto r = integrate([](double x) { return x * x * x - 2.0 * x + 1.0; }, -1.0, 3.0);
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(16.0).margin(1e-12));  // x^4/4 - x^2 + x on [-1,3]
}

TEST_CASE("smooth transcendental integrand") {
    auto r = integrate([](double x) { return std::exp(-x * x); }, 0.0, 10.0, 1e-12, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == Catch::Approx(std::sqrt(M_PI) / 2.0).margin(1e-12));
}

TEST_CASE("integrable endpoint singularity") {
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0, 1e-8, 1e-10,
                       20000);
    CHECK(r.value == Catch::Approx(2.0).margin(1e-5));
    CHECK(r.error < 1e-4);
}

TEST_CASE("error estimate is honest on a kinked integrand") {
    auto r = integrate([](double x) { return std::fabs(x - 0.3333); }, 0.0, 1.0, 1e-12, 1e-12);
    double exact = 0.5 * (0.3333 * 0.3333 + 0.6667 * 0.6667);
    CHECK(std::fabs(r.value - exact) <= std::max(r.error, 1e-12));
}

TEST_CASE("segment splitting") {
    auto r = integrate_segments([](double x) { return x < 1.0 ? 1.0 : 2.0; },
                                {0.0, 1.0, 2.0}, 1e-12, 1e-12);
    CHECK(r.value == Catch::Approx(3.0).margin(1e-12));
    CHECK_THROWS_AS(integrate_segments([](double) { return 0.0; }, {1.0}, 1e-6, 1e-6),
                    std::invalid_argument);
}
