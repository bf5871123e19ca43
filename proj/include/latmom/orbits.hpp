#pragma once

// Orbit counting for determinant-n pairs of class-constrained primitive
// vectors. Candidates are built from coset representatives of
// Gamma(N)\SL2(Z) times the canonical determinant-n representatives
// [[1,l],[0,n]], filtered to the class, and deduplicated with the exact
// transition test Y*X^-1 in Gamma(N). Everything here is integer arithmetic.

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "latmom/arith.hpp"
#include "latmom/lattice.hpp"

namespace latmom::orbits {

using lattice::CongruenceCondition;

struct Mat2i {
    // m[r][c], columns are the vector pair
    std::array<std::array<int64_t, 2>, 2> m = {{{1, 0}, {0, 1}}};

    int64_t det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

    Mat2i times(const Mat2i& o) const {
        Mat2i r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        return r;
    }

    Mat2i adjugate() const { return Mat2i{{{{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}}}}; }

    Mat2i reduced_mod(uint32_t N) const {
        Mat2i r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = CongruenceCondition::mod(m[i][j], N);
        return r;
    }

    std::array<int64_t, 2> column(int j) const { return {m[0][j], m[1][j]}; }

    bool operator==(const Mat2i& o) const { return m == o.m; }

    static Mat2i identity() { return {}; }
};

// Non-coprime Chinese remainder: x = a (mod m), x = b (mod n), solvable iff
// a = b mod gcd(m,n); unique mod lcm(m,n).
struct CrtSolution {
    int64_t value;    // in [0, modulus)
    int64_t modulus;  // lcm(m,n)
};

namespace detail {

inline int64_t ext_gcd(int64_t a, int64_t b, int64_t& x, int64_t& y) {
    if (b == 0) {
        x = (a >= 0) ? 1 : -1;
        y = 0;
        return a >= 0 ? a : -a;
    }
    int64_t x1, y1;
    int64_t g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

}  // namespace detail

inline std::optional<CrtSolution> solve_crt(int64_t a, int64_t b, int64_t m, int64_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("solve_crt: moduli must be positive");
    int64_t g = std::gcd(m, n);
    int64_t diff = b - a;
    if (diff % g != 0) return std::nullopt;
    int64_t lcm = m / g * n;
    int64_t x, y;
    detail::ext_gcd(m, n, x, y);  // m x + n y = g
    // a + m * x * (diff/g) solves both congruences
    __int128 t = static_cast<__int128>(x) * (diff / g) % (lcm / m);
    __int128 v = (static_cast<__int128>(a) + static_cast<__int128>(m) * t) % lcm;
    if (v < 0) v += lcm;
    return CrtSolution{static_cast<int64_t>(v), lcm};
}

// Representatives [[1,l],[0,n]], gcd(l,n)=1, 1<=l<=|n|; exactly phi(|n|) of
// them, pairwise inequivalent under SL2(Z).
inline std::vector<Mat2i> sl2z_orbit_reps(int64_t n) {
    if (n == 0) throw std::invalid_argument("sl2z_orbit_reps: n must be nonzero");
    int64_t an = n < 0 ? -n : n;
    std::vector<Mat2i> out;
    for (int64_t l = 1; l <= an; ++l)
        if (std::gcd(l, an) == 1) out.push_back(Mat2i{{{{1, l}, {0, n}}}});
    return out;
}

// Lift a residue matrix in SL2(Z/NZ) to SL2(Z).
inline Mat2i lift_to_sl2z(const Mat2i& residue, uint32_t N) {
    if (N == 0) throw std::invalid_argument("lift_to_sl2z: N must be positive");
    const int64_t Nn = N;
    Mat2i r = residue.reduced_mod(N);
    if (CongruenceCondition::mod(r.det(), N) != 1 % Nn)
        throw std::invalid_argument("lift_to_sl2z: det != 1 mod N");
    if (N == 1) return Mat2i::identity();

    // first column -> a coprime lift
    int64_t A = 0, C = 0;
    bool found = false;
    for (int64_t k = 0; k <= 16 && !found; ++k) {
        for (int64_t sk : {k, -k}) {
            for (int64_t m2 = 0; m2 <= 16 && !found; ++m2) {
                for (int64_t sm : {m2, -m2}) {
                    int64_t aa = r.m[0][0] + sk * Nn, cc = r.m[1][0] + sm * Nn;
                    if (aa == 0 && cc == 0) continue;
                    if (std::gcd(aa < 0 ? -aa : aa, cc < 0 ? -cc : cc) == 1) {
                        A = aa;
                        C = cc;
                        found = true;
                        break;
                    }
                }
            }
            if (found) break;
        }
    }
    if (!found) throw std::logic_error("lift_to_sl2z: no coprime column lift found");

    int64_t u, v;
    detail::ext_gcd(A, C, u, v);  // u A + v C = 1
    int64_t b0 = -v, d0 = u;      // A d0 - b0 C = 1
    // slide along the column: (b,d) = (b0 + s A, d0 + s C), match residues mod N
    for (int64_t s = 0; s < Nn; ++s) {
        int64_t b = b0 + s * A, d = d0 + s * C;
        if (CongruenceCondition::mod(b, N) == r.m[0][1] &&
            CongruenceCondition::mod(d, N) == r.m[1][1]) {
            Mat2i lift{{{{A, b}, {C, d}}}};
            if (lift.det() != 1) throw std::logic_error("lift_to_sl2z: det != 1");
            return lift;
        }
    }
    throw std::logic_error("lift_to_sl2z: residue adjustment failed");
}

struct CosetRep {
    Mat2i residue;  // in SL2(Z/NZ)
    Mat2i lift;     // in SL2(Z), reduces to residue mod N
};

// One representative per element of SL2(Z/NZ); count is group_index(N).
inline std::vector<CosetRep> coset_reps_mod_N(uint32_t N) {
    if (N == 0 || N > 12)
        throw std::invalid_argument("coset_reps_mod_N: need 1 <= N <= 12");
    std::vector<CosetRep> out;
    const int64_t Nn = N;
    for (int64_t a = 0; a < Nn; ++a)
        for (int64_t b = 0; b < Nn; ++b)
            for (int64_t c = 0; c < Nn; ++c)
                for (int64_t d = 0; d < Nn; ++d) {
                    if (CongruenceCondition::mod(a * d - b * c, N) != 1 % Nn) continue;
                    Mat2i res{{{{a, b}, {c, d}}}};
                    out.push_back({res, lift_to_sl2z(res, N)});
                }
    if (out.size() != arith::group_index(N))
        throw std::logic_error("coset_reps_mod_N: count != group index");
    return out;
}

// Exact test: X and Y (equal nonzero determinant) lie in the same
// Gamma(N)-orbit iff Y X^-1 is integral, det 1, congruent to I mod N.
inline bool same_gamma_orbit(const Mat2i& X, const Mat2i& Y, uint32_t N) {
    int64_t n = X.det();
    if (n == 0 || Y.det() != n)
        throw std::invalid_argument("same_gamma_orbit: need equal nonzero determinants");
    Mat2i T = Y.times(X.adjugate());  // = n * (Y X^-1)
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (T.m[i][j] % n != 0) return false;
    Mat2i t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) t.m[i][j] = T.m[i][j] / n;
    if (t.det() != 1) return false;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            int64_t want = (i == j) ? 1 % static_cast<int64_t>(N) : 0;
            if (CongruenceCondition::mod(t.m[i][j], N) != want) return false;
        }
    return true;
}

// N*phi(|n|)/phi(N) when N divides n, else 0.
inline uint64_t predicted_orbit_count(uint32_t N, int64_t n) {
    if (n == 0) throw std::invalid_argument("predicted_orbit_count: n must be nonzero");
    uint64_t an = static_cast<uint64_t>(n < 0 ? -n : n);
    if (an % N != 0) return 0;
    uint64_t num = N * arith::euler_phi(an), den = arith::euler_phi(N);
    if (num % den != 0) throw std::logic_error("predicted_orbit_count: not divisible");
    return num / den;
}

// Counts Gamma(N)-orbits in D_n^(sigma) by explicit construction and exact
// deduplication. Desk-scale guards keep the candidate set small.
inline uint64_t count_orbits(uint32_t N, const CongruenceCondition& sigma, int64_t n) {
    if (N == 0 || N > 8) throw std::invalid_argument("count_orbits: need 1 <= N <= 8");
    if (n == 0 || (n < 0 ? -n : n) > 60)
        throw std::invalid_argument("count_orbits: need 0 < |n| <= 60");
    if (sigma.modulus != N) throw std::invalid_argument("count_orbits: sigma modulus mismatch");

    const int64_t an = n < 0 ? -n : n;
    const bool divisible = (an % N == 0);
    auto reps = coset_reps_mod_N(N);
    auto dets = sl2z_orbit_reps(n);

    std::vector<Mat2i> classes;
    for (const auto& rep : reps) {
        auto col = rep.residue.column(0);
        bool col_match = (col[0] == sigma.v0[0] && col[1] == sigma.v0[1]);
        for (const auto& J : dets) {
            Mat2i X = rep.lift.times(J);
            auto c1 = X.column(0), c2 = X.column(1);
            bool in_cls = sigma.matches(c1[0], c1[1]) && sigma.matches(c2[0], c2[1]);
            if (divisible) {
                // both columns in class  <=>  first column matches and l = 1 mod N
                int64_t l = J.m[0][1];
                bool expected = col_match && (CongruenceCondition::mod(l - 1, N) == 0);
                if (in_cls != expected)
                    throw std::logic_error("count_orbits: class filter inconsistency");
            }
            if (!in_cls) continue;
            if (!lattice::is_primitive(c1[0], c1[1]) || !lattice::is_primitive(c2[0], c2[1]))
                throw std::logic_error("count_orbits: non-primitive candidate");
            bool dup = false;
            for (const auto& Y : classes)
                if (same_gamma_orbit(Y, X, N)) {
                    dup = true;
                    break;
                }
            if (!dup) classes.push_back(X);
        }
    }
    return classes.size();
}

}  // namespace latmom::orbits
