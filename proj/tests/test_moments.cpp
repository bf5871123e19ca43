#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "latmom/moments.hpp"

using namespace latmom;
using namespace latmom::moments;
using lattice::CongruenceCondition;

namespace {

// closed-form oracle for the eta integral over a disk of radius R:
// (4 pi/|n|) (sqrt(R^4-n^2) - |n| acos(|n|/R^2)) for |n| <= R^2
double eta_disk_closed_form(double R, int64_t n) {
    double an = std::fabs(double(n)), D = R * R;
    if (an >= D) return 0.0;
    return 4.0 * M_PI / an * (std::sqrt(D * D - an * an) - an * std::acos(an / D));
}

constexpr double kZeta2 = M_PI * M_PI / 6.0;

}  // namespace

TEST_CASE("siegel values on explicit samples") {
    randlat::LatticeSample s;
    s.g = lattice::Basis::identity();
    s.twist = orbits::Mat2i::identity();
    CongruenceCondition sigma(2, 1, 0);
    CHECK(siegel_value(s, sigma, Indicator{geometry::Disk{2.5}}) == 6.0);
    CHECK(siegel_value(s, sigma, Indicator{geometry::Rect{1, 0, 0, 1}}) == 0.0);
    // a twist transports the class before counting
    s.twist = orbits::Mat2i{{{{0, 1}, {1, 0}}}};
    CHECK(siegel_value(s, sigma, Indicator{geometry::Disk{2.5}}) ==
          double(lattice::count_points(s.g, geometry::Disk{2.5},
                                       lattice::PointFilter::Class,
                                       CongruenceCondition(2, 0, 1))));
    CHECK_THROWS_AS(siegel_value(s, sigma, Indicator{geometry::Disk{1.0}}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("first-moment theory values") {
    auto t2 = first_moment_theory(2, geometry::Disk{5.0});
    CHECK(t2.value == Catch::Approx(50.0 / M_PI).margin(1e-10));
    auto t1 = first_moment_theory(1, geometry::Disk{5.0});
    CHECK(t1.value == Catch::Approx(25.0 * M_PI / kZeta2).margin(1e-10));
    auto t3 = first_moment_theory(3, geometry::Rect{0, 4, 0, 4});
    double zeta3 = kZeta2 * (1.0 - 1.0 / 9.0);
    CHECK(t3.value == Catch::Approx(16.0 / (zeta3 * 9.0)).margin(1e-10));
    // scaling covariance: disk R doubles -> theory quadruples
    CHECK(first_moment_theory(2, geometry::Disk{10.0}).value ==
          Catch::Approx(4.0 * t2.value).margin(1e-9));
}

TEST_CASE("class-sum and equidistribution of first-moment theory") {
    for (uint32_t N : {2u, 3u}) {
        auto area = geometry::region_area(geometry::Disk{4.0}).value;
        double per_class = first_moment_theory(N, geometry::Disk{4.0}).value;
        double total = per_class * double(lattice::list_congruence_classes(N).size());
        CHECK(total == Catch::Approx(area / kZeta2).margin(1e-9));
    }
}

TEST_CASE("measure constants") {
    auto c1 = measure_constants(1);
    CHECK(c1.index == 1);
    CHECK(c1.nu_to_eta == Catch::Approx(kZeta2).margin(1e-12));
    auto c2 = measure_constants(2);
    CHECK(c2.index == 6);
    CHECK(c2.nu_to_eta == Catch::Approx(M_PI * M_PI).margin(1e-10));
    auto c3 = measure_constants(3);
    CHECK(c3.index == 24);
    CHECK(c3.nu_to_eta == Catch::Approx(kZeta2 * (8.0 / 9.0) * 27.0).margin(1e-9));
}

TEST_CASE("eta integral: quadrature vs closed form on disks") {
    for (double R : {2.0, 3.0}) {
        for (int64_t n = 1; double(n) < R * R + 2; ++n) {
            auto got = eta_integral(geometry::Disk{R}, n, 1e-8);
            double want = eta_disk_closed_form(R, n);
            CHECK(got.value == Catch::Approx(want).margin(1e-5));
            auto neg = eta_integral(geometry::Disk{R}, -n, 1e-8);
            CHECK(neg.value == Catch::Approx(want).margin(1e-5));
        }
    }
    // frozen externals
    CHECK(eta_integral(geometry::Disk{3.0}, 2).value ==
          Catch::Approx(38.2115553576844096).margin(1e-5));
    CHECK(eta_integral(geometry::Disk{3.0}, 8).value ==
          Catch::Approx(0.4964464536798016).margin(1e-6));
    CHECK(eta_integral(geometry::Disk{2.0}, 1).value ==
          Catch::Approx(32.1054090425508210).margin(1e-5));
    // vanishing beyond the max determinant
    CHECK(eta_integral(geometry::Disk{3.0}, 9).value == 0.0);
    CHECK(eta_integral(geometry::Disk{3.0}, 12).value == 0.0);
    CHECK_THROWS_AS(eta_integral(geometry::Disk{1.0}, 0), std::invalid_argument);
}

TEST_CASE("eta integral: delta-slab Monte Carlo oracle") {
    auto mc = eta_integral_slab_mc(geometry::Disk{3.0}, 2, 0.02, 600000, 5);
    CHECK(std::fabs(mc.value - 38.2115553576844096) <= mc.abs_error_bound + 0.35);

    // annulus: quadrature vs slab MC
    geometry::Region ann = geometry::Annulus{1.0, 2.5};
    auto quad = eta_integral(ann, 2, 1e-8);
    auto slab = eta_integral_slab_mc(ann, 2, 0.02, 600000, 6);
    CHECK(std::fabs(quad.value - slab.value) <= slab.abs_error_bound + 0.1);

    // rectangle, including a sign-asymmetric one
    geometry::Region rect = geometry::Rect{-1.0, 2.0, -1.5, 1.0};
    for (int64_t n : {1, -1, 2}) {
        auto quad_r = eta_integral(rect, n, 1e-7);
        auto slab_r = eta_integral_slab_mc(rect, n, 0.02, 600000, 7);
        CHECK(std::fabs(quad_r.value - slab_r.value) <= slab_r.abs_error_bound + 0.1);
    }
}

TEST_CASE("flat second-moment right-hand side") {
    CongruenceCondition sigma(2, 1, 1);
    auto rhs = second_moment_rhs(2, sigma, geometry::Disk{3.0}, 1e-8);
    CHECK(rhs.n_max == 9);
    CHECK(rhs.diagonal == Catch::Approx(11.4591559026164642).margin(1e-9));
    CHECK(rhs.kernel == Catch::Approx(28.3340495200033971).margin(2e-4));
    CHECK(rhs.value == Catch::Approx(39.7932054226198613).margin(2e-4));
    CHECK(rhs.value_alt == Catch::Approx(25.6261806626181627).margin(2e-4));
    CHECK(rhs.value == Catch::Approx(rhs.diagonal + rhs.kernel).margin(1e-12));
    CHECK(rhs.kernel_alt == Catch::Approx(rhs.kernel / 2.0).margin(1e-12));

    // small disk: kernel sum is empty, only the diagonal survives
    auto small = second_moment_rhs(2, sigma, geometry::Disk{1.0}, 1e-8);
    CHECK(small.kernel == 0.0);
    CHECK(small.value == Catch::Approx(4.0 / M_PI).margin(1e-10));

    auto empty = second_moment_rhs(2, sigma, geometry::Rect{1, 0, 0, 1}, 1e-8);
    CHECK(empty.value == 0.0);
}

TEST_CASE("flat moments vs Monte Carlo at small sample counts") {
    // N = 1 classical primitive second moment: validates the eta normalization
    CongruenceCondition triv(1, 0, 0);
    auto rhs1 = second_moment_rhs(1, triv, geometry::Disk{2.0}, 1e-7);
    CHECK(rhs1.value == Catch::Approx(69.6424278298675196).margin(2e-4));
    auto mc1 = second_moment_mc(1, triv, Indicator{geometry::Disk{2.0}}, 30000, 2024);
    CHECK(std::fabs(mc1.mean - rhs1.value) <= 5.0 * mc1.stderr_);

    CongruenceCondition sigma(2, 1, 0);
    auto est = first_moment_mc(2, sigma, Indicator{geometry::Disk{5.0}}, 20000, 2024);
    CHECK(std::fabs(est.mean - 50.0 / M_PI) <= 5.0 * est.stderr_);
    CHECK(est.samples == 20000);
    CHECK(est.elapsed_seconds >= 0.0);

    // class equidistribution: two classes agree within combined error
    auto est2 = first_moment_mc(2, CongruenceCondition(2, 1, 1),
                                Indicator{geometry::Disk{5.0}}, 20000, 2024);
    double comb = std::hypot(est.stderr_, est2.stderr_);
    CHECK(std::fabs(est.mean - est2.mean) <= 5.0 * comb);

    // scaling covariance: the disk-2R estimate sits near 4x the disk-R one
    auto small_r = first_moment_mc(2, sigma, Indicator{geometry::Disk{2.5}}, 20000, 321);
    auto big_r = first_moment_mc(2, sigma, Indicator{geometry::Disk{5.0}}, 20000, 321);
    CHECK(std::fabs(big_r.mean - 4.0 * small_r.mean) <=
          5.0 * std::hypot(big_r.stderr_, 4.0 * small_r.stderr_));
}

TEST_CASE("cone moments: MC vs theory and kernel cross-checks") {
    CongruenceCondition sigma(2, 1, 0);
    auto est = cone_first_moment_mc(2, sigma, Indicator{geometry::Disk{5.0}}, 20000, 77);
    CHECK(std::fabs(est.mean - 50.0 / M_PI) <= 5.0 * est.stderr_);

    // flat and cone first moments share one theory value and agree with
    // each other within combined error
    auto flat = first_moment_mc(2, sigma, Indicator{geometry::Disk{5.0}}, 20000, 77);
    CHECK(std::fabs(est.mean - flat.mean) <= 5.0 * std::hypot(est.stderr_, flat.stderr_));

    // kernel by pair MC vs deterministic quadrature, plus a frozen external
    auto quad = cone_kernel_quadrature_disk(2, 3.0, 1e-7);
    CHECK(quad.value == Catch::Approx(31.137471).margin(3e-3));
    auto pairs = cone_kernel_pair_mc(2, geometry::Disk{3.0}, 400000, 99, 1e-6);
    CHECK(std::fabs(pairs.value - quad.value) <=
          4.0 * pairs.stderr_ + pairs.phi_bound + quad.abs_error_bound);

    CongruenceCondition sig11(2, 1, 1);
    auto rhs_half = cone_second_moment_rhs(2, sig11, geometry::Disk{3.0}, true, pairs);
    auto rhs_full = cone_second_moment_rhs(2, sig11, geometry::Disk{3.0}, false, pairs);
    CHECK(rhs_full.value - rhs_half.value == Catch::Approx(18.0 / M_PI).margin(1e-9));
    CHECK(rhs_half.diagonal == Catch::Approx(18.0 / M_PI).margin(1e-9));

    // the cone MC should land on the half-diagonal variant
    auto mc = cone_second_moment_mc(2, sig11, Indicator{geometry::Disk{3.0}}, 30000, 77);
    double comb = std::sqrt(mc.stderr_ * mc.stderr_ + pairs.stderr_ * pairs.stderr_) +
                  pairs.phi_bound;
    CHECK(std::fabs(mc.mean - rhs_half.value) <= 5.0 * comb);
    CHECK(std::fabs(mc.mean - rhs_full.value) > 10.0 * comb);
}

TEST_CASE("estimates are bit-identical across worker counts") {
    CongruenceCondition sigma(2, 1, 1);
    Indicator f{geometry::Disk{3.0}};
    auto a = second_moment_mc(2, sigma, f, 6000, 31, 1);
    auto b = second_moment_mc(2, sigma, f, 6000, 31, 8);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    auto ka = cone_kernel_pair_mc(2, f.region, 6000, 31, 1e-5, 1);
    auto kb = cone_kernel_pair_mc(2, f.region, 6000, 31, 1e-5, 8);
    CHECK(ka.value == kb.value);
}

TEST_CASE("moment estimators validate their inputs") {
    CongruenceCondition sigma(2, 1, 0);
    CHECK_THROWS_AS(first_moment_mc(2, sigma, Indicator{geometry::Disk{1.0}}, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(second_moment_rhs(3, sigma, geometry::Disk{1.0}, 1e-6),
                    std::invalid_argument);
}
