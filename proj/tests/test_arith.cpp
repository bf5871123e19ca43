#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "latmom/arith.hpp"
#include "latmom/quadrature.hpp"

using namespace latmom;
using namespace latmom::arith;

namespace {

// independent totient oracle: direct gcd count
uint64_t phi_by_gcd(uint64_t n) {
    uint64_t c = 0;
    for (uint64_t k = 1; k <= n; ++k)
        if (std::gcd(k, n) == 1) ++c;
    return c;
}

uint64_t sl2_brute_order(uint64_t N) {
    uint64_t count = 0;
    for (uint64_t a = 0; a < N; ++a)
        for (uint64_t b = 0; b < N; ++b)
            for (uint64_t c = 0; c < N; ++c)
                for (uint64_t d = 0; d < N; ++d) {
                    int64_t det = static_cast<int64_t>(a * d) - static_cast<int64_t>(b * c);
                    int64_t m = ((det % static_cast<int64_t>(N)) + static_cast<int64_t>(N)) %
                                static_cast<int64_t>(N);
                    if (m == static_cast<int64_t>(1 % N)) ++count;
                }
    return count;
}

}  // namespace

TEST_CASE("euler phi") {
    CHECK(euler_phi(1) == 1);
    CHECK(euler_phi(2) == 1);
    CHECK(euler_phi(12) == phi_by_gcd(12));
    CHECK(euler_phi(12) == 4);
    for (uint64_t n = 1; n <= 300; ++n) CHECK(euler_phi(n) == phi_by_gcd(n));
    CHECK_THROWS_AS(euler_phi(0), std::domain_error);
    CHECK(euler_phi_abs(-6) == 2);
}

TEST_CASE("mobius") {
    CHECK(mobius(1) == 1);
    CHECK(mobius(6) == 1);
    CHECK(mobius(12) == 0);
    CHECK(mobius(30) == -1);
    CHECK_THROWS_AS(mobius(0), std::domain_error);
    // sum_{d|n} mu(d) = [n == 1]
    for (uint64_t n = 1; n <= 200; ++n) {
        int64_t s = 0;
        for (uint64_t d = 1; d <= n; ++d)
            if (n % d == 0) s += mobius(d);
        CHECK(s == (n == 1 ? 1 : 0));
    }
}

TEST_CASE("group index") {
    CHECK(group_index(1) == 1);
    CHECK(group_index(2) == 6);
    CHECK(group_index(6) == 144);
    for (uint64_t N = 1; N <= 8; ++N) CHECK(group_index(N) == sl2_brute_order(N));
}

TEST_CASE("factor table") {
    FactorTable t(1000);
    for (uint32_t n = 2; n <= 1000; ++n) {
        uint32_t p = t.smallest_prime_factor(n);
        CHECK(n % p == 0);
        CHECK(t.is_prime(p));
    }
    CHECK(t.distinct_prime_factors(12) == std::vector<uint32_t>{2, 3});
    CHECK(t.distinct_prime_factors(1).empty());
}

TEST_CASE("restricted zeta values") {
    double pi2 = M_PI * M_PI;
    auto z1 = zeta_N(1, 2, 1e-12);
    CHECK(std::fabs(z1.value - pi2 / 6.0) <= 1e-12);
    CHECK(z1.abs_error_bound <= 1e-12);

    auto z2 = zeta_N(2, 2, 1e-12);
    CHECK(std::fabs(z2.value - pi2 / 8.0) <= 1e-12);

    auto z6 = zeta_N(6, 2, 1e-12);
    CHECK(std::fabs(z6.value - pi2 / 9.0) <= 1e-12);

    // multiplicative consistency: zeta_N(2) = zeta(2) * prod_{p|N} (1 - p^-2)
    for (uint64_t N : {2ull, 3ull, 10ull, 30ull}) {
        double prod = 1.0;
        for (uint64_t p : distinct_prime_factors(N)) prod *= 1.0 - 1.0 / double(p * p);
        CHECK(zeta_N(N, 2, 1e-12).value ==
              Catch::Approx(z1.value * prod).margin(1e-12));
    }

    // truncated Euler product over odd primes as a slow independent route
    {
        double prod = 1.0;
        FactorTable t(200000);
        for (uint32_t p = 3; p <= 200000; p += 2)
            if (t.is_prime(p)) prod *= 1.0 / (1.0 - 1.0 / (double(p) * double(p)));
        CHECK(std::fabs(prod - pi2 / 8.0) < 2e-5);
    }

    CHECK(zeta_N(1, 3, 1e-12).value == Catch::Approx(1.2020569031595943).margin(1e-12));
    CHECK_THROWS_AS(zeta_N(1, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(zeta_N(1, 2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(zeta_N(0, 2, 1e-6), std::domain_error);
}

TEST_CASE("S_N(m) enumeration and formula") {
    CHECK(s_N_m_enumerate(3, 1) == 1);
    CHECK(s_N_m_enumerate(2, 3) == 2);
    CHECK(s_N_m_enumerate(2, 2) == 2);
    CHECK(s_N_m_formula(3, 1) == 1);
    CHECK(s_N_m_formula(2, 3) == 2);
    CHECK(s_N_m_formula(4, 6) == 4);
    CHECK(s_N_m_enumerate(4, 6) == 4);
    for (uint64_t N = 1; N <= 12; ++N)
        for (uint64_t m = 1; m <= 50; ++m)
            CHECK(s_N_m_enumerate(N, m) == s_N_m_formula(N, m));
}

TEST_CASE("segmented totient sieve matches direct") {
    std::vector<uint64_t> got;
    for_each_totient(500, [&](uint64_t n, uint64_t ph) {
        CHECK(n == got.size() + 1);
        got.push_back(ph);
    });
    REQUIRE(got.size() == 500);
    for (uint64_t n = 1; n <= 500; ++n) CHECK(got[n - 1] == phi_by_gcd(n));
}

TEST_CASE("phi partial sums") {
    auto a = phi_partial_sum(2, 2);
    CHECK(to_string_int128(a.exact_sum) == "1");

    auto b = phi_partial_sum(1, 10);
    CHECK(to_string_int128(b.exact_sum) == "32");

    auto c = phi_partial_sum(3, 3);
    CHECK(to_string_int128(c.exact_sum) == "2");

    CHECK_THROWS_AS(phi_partial_sum(2, 1), std::invalid_argument);

    // error envelope |exact - leading| / (K log K) stays small
    for (uint64_t N : {2ull, 3ull, 6ull}) {
        for (uint64_t K : {10000ull, 100000ull}) {
            auto ps = phi_partial_sum(N, K);
            double err = std::fabs(double(ps.exact_sum) - ps.leading_term);
            CHECK(err / (double(K) * std::log(double(K))) <= 5.0);
        }
    }
}

TEST_CASE("Phi_N kernel") {
    PhiKernel k2(2, 16.0, 1e-8);
    CHECK(k2(0.0).value == 0.0);
    CHECK(k2(0.0).abs_error_bound == 0.0);

    // frozen external value (independent high-precision summation)
    CHECK(k2(2.0).value == Catch::Approx(0.7819615872115).margin(1e-8));
    CHECK(k2(2.0).abs_error_bound <= 1e-8);
    CHECK(k2(-2.0).value == k2(2.0).value);

    // direct-summation oracle with a crude interval tail bound
    {
        const uint64_t M = 2000000;
        for (uint64_t N : {2ull, 3ull}) {
            double S[3] = {0, 0, 0};  // suffix sums from x = 2, 5, 11
            for_each_totient(M, [&](uint64_t n, uint64_t ph) {
                if (n % N) return;
                double t = double(ph) / (double(n) * double(n) * double(n));
                if (n >= 2) S[0] += t;
                if (n >= 5) S[1] += t;
                if (n >= 11) S[2] += t;
            });
            double crude_tail = (1.0 / double(N)) / double(M - N);  // phi(n) <= n
            PhiKernel k(N, 16.0, 1e-8);
            double ratio = double(N) / double(euler_phi(N));
            double xs[3] = {2.0, 5.0, 11.0};
            for (int i = 0; i < 3; ++i) {
                double lo = ratio * xs[i] * S[i];
                double hi = ratio * xs[i] * (S[i] + crude_tail);
                double v = k(xs[i]).value;
                CHECK(v >= lo - 1e-9);
                CHECK(v <= hi + 1e-9);
            }
        }
    }

    // limit: Phi_N(x) -> 1/(zeta_N(2) N)
    PhiKernel k2big(2, 1e6, 1e-6);
    CHECK(k2big.limit_value() == Catch::Approx(4.0 / (M_PI * M_PI)).margin(1e-12));
    CHECK(k2big(1e6).value == Catch::Approx(4.0 / (M_PI * M_PI)).margin(1e-4));

    // integral_from_zero against direct quadrature of the kernel
    {
        double X = 7.0;
        std::vector<double> brk{0.0, 2.0, 4.0, 6.0, X};
        auto q = quadrature::integrate_segments(
            [&](double x) { return k2(x).value; }, brk, 1e-10, 1e-12);
        CHECK(k2.integral_from_zero(X) == Catch::Approx(q.value).margin(1e-7));
    }

    CHECK_THROWS_AS(k2(100.0), std::invalid_argument);
    CHECK_THROWS_AS(PhiKernel(1, 10.0, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(PhiKernel(2, 10.0, 0.0), std::invalid_argument);

    // cached front end
    auto v = Phi_N(2, 2.0, 1e-8);
    CHECK(v.value == Catch::Approx(k2(2.0).value).margin(1e-8));
    CHECK_THROWS_AS(Phi_N(2, 1.0, -1.0), std::invalid_argument);
}
