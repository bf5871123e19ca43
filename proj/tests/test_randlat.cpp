#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "latmom/arith.hpp"
#include "latmom/randlat.hpp"
#include "latmom/stats.hpp"

using namespace latmom;
using namespace latmom::randlat;

TEST_CASE("x-rejection acceptance probability lies in (0,1]") {
    for (double x = -0.5; x <= 0.5; x += 0.01) {
        double p = accept_prob_x(x);
        CHECK(p > 0.0);
        CHECK(p <= 1.0 + 1e-15);
    }
    CHECK(accept_prob_x(0.5) == Catch::Approx(1.0));
    CHECK(accept_prob_x(0.0) == Catch::Approx(std::sqrt(0.75)));
}

TEST_CASE("modular-surface samples: domain, determinant, determinism") {
    RngStream a(11, 0), b(11, 0);
    for (int i = 0; i < 10000; ++i) {
        auto pa = sample_modular_surface(a);
        auto pb = sample_modular_surface(b);
        CHECK(pa.x == pb.x);
        CHECK(pa.y == pb.y);
        CHECK(pa.theta == pb.theta);
        REQUIRE(std::fabs(pa.x) <= 0.5);
        REQUIRE(pa.x * pa.x + pa.y * pa.y >= 1.0 - 1e-12);
        REQUIRE(pa.theta >= 0.0);
        REQUIRE(pa.theta < 2.0 * M_PI);
        REQUIRE(std::fabs(pa.g.det() - 1.0) <= 1e-12);
    }
}

TEST_CASE("y-tail probability 3/(2 pi)") {
    const int M = 200000;
    int hits = 0;
    for (int i = 0; i < M; ++i) {
        RngStream rng(17, substream(StreamTag::kCalibration, i));
        if (sample_modular_surface(rng).y >= 2.0) ++hits;
    }
    double p = 3.0 / (2.0 * M_PI);
    double se = std::sqrt(p * (1 - p) / M);
    CHECK(std::fabs(double(hits) / M - p) <= 5.0 * se);
}

TEST_CASE("x-marginal passes a KS test against the analytic CDF") {
    // density ~ (1-x^2)^{-1/2} on [-1/2,1/2]; CDF = (3/pi)(asin x + pi/6)
    const size_t M = 1000000;
    std::vector<double> xs(M);
    for (size_t i = 0; i < M; ++i) {
        RngStream rng(23, substream(StreamTag::kCalibration, i));
        xs[i] = sample_modular_surface(rng).x;
    }
    double d = ks_statistic(std::move(xs), [](double x) {
        return (3.0 / M_PI) * (std::asin(x) + M_PI / 6.0);
    });
    CHECK(d < ks_critical(1e-3, M));
}

TEST_CASE("coset sampling is uniform") {
    for (uint32_t N : {2u, 3u}) {
        auto reps = orbits::coset_reps_mod_N(N);
        std::vector<uint64_t> hist(reps.size(), 0);
        RngStream rng(31, 0);
        const uint64_t draws = 100000;
        for (uint64_t i = 0; i < draws; ++i) {
            auto u = sample_coset(N, rng);
            for (size_t k = 0; k < reps.size(); ++k)
                if (reps[k].residue == u) {
                    ++hist[k];
                    break;
                }
        }
        uint64_t total = 0;
        for (auto h : hist) total += h;
        CHECK(total == draws);
        double stat = chi_squared_stat(hist, double(draws) / reps.size());
        CHECK(chi_squared_sf(stat, double(reps.size() - 1)) > 1e-3);
    }
    RngStream rng(5, 5);
    CHECK(sample_coset(1, rng) == orbits::Mat2i::identity());
}

TEST_CASE("nu_N and cone samples") {
    RngStream rng(41, 0);
    auto s = sample_nu_N(1, rng);
    CHECK(s.twist == orbits::Mat2i::identity());

    std::vector<double> ts;
    for (int i = 0; i < 50000; ++i) {
        RngStream r(43, substream(StreamTag::kGeneric, i));
        auto c = sample_cone(2, r);
        REQUIRE(c.t > 0.0);
        REQUIRE(c.t <= 1.0);
        ts.push_back(c.t);
    }
    auto ms = mean_and_stderr(ts);
    CHECK(std::fabs(ms.mean - 0.5) <= 4.0 * ms.stderr_);
}

TEST_CASE("twisted classes") {
    using lattice::CongruenceCondition;
    CongruenceCondition sigma(2, 1, 0);
    CHECK(twisted_class(sigma, orbits::Mat2i::identity()).v0 == sigma.v0);

    orbits::Mat2i swap{{{{0, 1}, {1, 0}}}};
    CHECK(twisted_class(sigma, swap).v0 == std::array<int64_t, 2>{0, 1});

    CongruenceCondition sig11(2, 1, 1);
    orbits::Mat2i shear{{{{1, 1}, {0, 1}}}};
    CHECK(twisted_class(sig11, shear).v0 == std::array<int64_t, 2>{0, 1});

    // for each u, the transport permutes the class list
    for (uint32_t N : {2u, 3u, 4u}) {
        auto classes = lattice::list_congruence_classes(N);
        for (const auto& rep : orbits::coset_reps_mod_N(N)) {
            std::vector<std::array<int64_t, 2>> image;
            for (const auto& sigma2 : classes)
                image.push_back(twisted_class(sigma2, rep.residue).v0);
            std::sort(image.begin(), image.end());
            CHECK(std::adjacent_find(image.begin(), image.end()) == image.end());
            CHECK(image.size() == classes.size());
        }
    }
}
