#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "latmom/experiments.hpp"
#include "latmom/moments.hpp"

using namespace latmom;
using namespace latmom::experiments;
using lattice::Basis;
using lattice::CongruenceCondition;

TEST_CASE("region families") {
    RegionFamily fam;
    fam.volumes = {10.0, 100.0};
    fam.validate();
    auto r = fam.region_for_volume(100.0);
    CHECK(geometry::region_area(r).value == Catch::Approx(100.0));

    RegionFamily rect;
    rect.shape = RegionFamily::Shape::Rect;
    rect.rect_aspect = 2.0;
    rect.volumes = {50.0};
    CHECK(geometry::region_area(rect.region_for_volume(50.0)).value == Catch::Approx(50.0));

    RegionFamily bad;
    bad.volumes = {10.0, 10.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("schmidt experiment on an explicit lattice") {
    RegionFamily fam;
    fam.volumes = {M_PI * 2.5 * 2.5};
    CongruenceCondition sigma(2, 1, 0);
    auto rows = schmidt_experiment(2, sigma, fam,
                                   LatticeSource{std::vector<Basis>{Basis::identity()}}, 0);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].count == 6);
    CHECK(rows[0].predicted == Catch::Approx(3.9788735772973836).margin(1e-10));

    fam.volumes = {1e-6};
    auto zero = schmidt_experiment(2, sigma, fam,
                                   LatticeSource{std::vector<Basis>{Basis::identity()}}, 0);
    CHECK(zero[0].count == 0);
}

TEST_CASE("schmidt counts are monotone in the volume") {
    RegionFamily fam;
    for (double v = 100.0; v <= 4000.0; v *= 1.7) fam.volumes.push_back(v);
    CongruenceCondition sigma(2, 1, 1);
    auto rows =
        schmidt_experiment(2, sigma, fam, LatticeSource{uint64_t{3}}, 5);
    REQUIRE(rows.size() == 3 * fam.volumes.size());
    for (size_t lat = 0; lat < 3; ++lat)
        for (size_t k = 1; k < fam.volumes.size(); ++k)
            CHECK(rows[lat * fam.volumes.size() + k].count >=
                  rows[lat * fam.volumes.size() + k - 1].count);
}

TEST_CASE("schmidt normalized errors stay in the envelope at desk scale") {
    RegionFamily fam;
    fam.volumes = {1e4, 1e5};
    CongruenceCondition sigma(2, 1, 0);
    auto rows = schmidt_experiment(2, sigma, fam, LatticeSource{uint64_t{6}}, 11);
    int ok = 0;
    for (const auto& r : rows)
        if (r.normalized_error <= 5.0) ++ok;
    CHECK(ok >= int(rows.size()) - 1);
}

TEST_CASE("khintchine counts match the brute oracle and the geometric count") {
    geometry::PsiSpec psi = geometry::PowerLawPsi{1.0, 0.5};

    // worked example: x = sqrt(2)-1, T = 4, unconstrained primitive
    CongruenceCondition triv(1, 0, 0);
    double x0 = std::sqrt(2.0) - 1.0;
    uint64_t direct = khintchine_count(x0, 4, psi, triv);
    uint64_t brute = 0;
    for (int64_t q = -4; q <= 4; ++q) {
        if (q == 0) continue;
        double w = std::pow(std::fabs(double(q)), -0.5);
        for (int64_t p = -8; p <= 8; ++p)
            if (std::fabs(double(q) * x0 - double(p)) < w && lattice::is_primitive(p, q))
                ++brute;
    }
    CHECK(direct == brute);

    // geometric identity: the window count is the class count of the sheared
    // lattice in the box with |y| >= 1
    CongruenceCondition sigma(2, 1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        RngStream rng(404, trial);
        double x = rng.uniform_open01();
        uint64_t T = 200;
        uint64_t counted = khintchine_count(x, T, psi, sigma);
        Basis shear{1.0, -x, 0.0, 1.0};
        geometry::KhintchineBox box{psi, double(T), 1.0};
        uint64_t geo = lattice::count_points(shear, box, lattice::PointFilter::Class, sigma);
        CHECK(counted == geo);
    }

    // partition over the classes mod 2 recovers the primitive count
    uint64_t prim = khintchine_count(x0, 50, psi, triv);
    uint64_t split = 0;
    for (const auto& s : lattice::list_congruence_classes(2))
        split += khintchine_count(x0, 50, psi, s);
    CHECK(split == prim);
}

TEST_CASE("khintchine experiment: ratios, monotonicity, warnings") {
    CongruenceCondition sigma(2, 1, 1);
    geometry::PsiSpec psi = geometry::PowerLawPsi{1.0, 0.5};
    auto res = khintchine_experiment(2, sigma, psi, {500, 2000},
                                     XSource{uint64_t{8}}, 31);
    REQUIRE(res.rows.size() == 16);
    CHECK(!res.divergence_warning);
    double mean_ratio = 0.0;
    for (const auto& r : res.rows) {
        CHECK(r.predicted > 0.0);
        mean_ratio += r.ratio;
    }
    mean_ratio /= double(res.rows.size());
    CHECK(mean_ratio > 0.6);
    CHECK(mean_ratio < 1.4);
    // counts non-decreasing in T per x
    for (size_t i = 0; i < 8; ++i) CHECK(res.rows[2 * i + 1].count >= res.rows[2 * i].count);

    auto conv = khintchine_experiment(2, sigma, geometry::PowerLawPsi{1.0, 1.5}, {100},
                                      XSource{uint64_t{2}}, 31);
    CHECK(conv.divergence_warning);

    CHECK_THROWS_AS(khintchine_experiment(2, sigma,
                                          geometry::TablePsi{{1.0, 2.0}, {0.1, 0.2}}, {100},
                                          XSource{uint64_t{2}}, 31),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        khintchine_experiment(2, sigma, psi, {100, 100}, XSource{uint64_t{2}}, 31),
        std::invalid_argument);
}

TEST_CASE("khintchine prediction uses the window-and-sign normalization") {
    // predicted = 4 * sum psi / (zeta_N(2) N^2); empirical ratios hover near 1
    CongruenceCondition sigma(2, 1, 1);
    geometry::PsiSpec psi = geometry::PowerLawPsi{1.0, 0.5};
    auto res = khintchine_experiment(2, sigma, psi, {20000}, XSource{uint64_t{6}}, 99);
    double mean_ratio = 0.0;
    for (const auto& r : res.rows) mean_ratio += r.ratio;
    mean_ratio /= double(res.rows.size());
    CHECK(mean_ratio == Catch::Approx(1.0).margin(0.25));
}
