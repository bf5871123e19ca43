#pragma once

// Seeded sampling from the Haar probability measure on SL2(R)/Gamma(N) and
// from the cone (0,1] x SL2(R)/Gamma(N).
//
// A point of SL2(R)/SL2(Z) is drawn as (x,y,theta): (x,y) with density
// proportional to y^-2 on the modular fundamental domain {|x| <= 1/2,
// x^2+y^2 >= 1}, theta uniform on [0,2pi). The basis is
//
//   g = Rot(theta) * [[1/sqrt(y), x/sqrt(y)], [0, sqrt(y)]],
//
// whose columns are the complex pair (1, x+iy)/sqrt(y); the pushforward of
// this law is the Haar measure on the lattice space. theta double-covers the
// +-I identification, which is harmless for expectations.
//
// A nu_N point additionally carries a uniform twist u in SL2(Z/NZ): the right
// translates of the SL2(Z) fundamental domain by coset representatives of
// Gamma(N)\SL2(Z) partition a Gamma(N) fundamental domain with equal mass,
// and a Siegel-transform evaluation at g*gamma_i equals the evaluation of the
// transported class (u*v0, N) at g. Only residue matrices are needed on the
// sampling path.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "latmom/arith.hpp"
#include "latmom/lattice.hpp"
#include "latmom/orbits.hpp"
#include "latmom/rng.hpp"

namespace latmom::randlat {

using lattice::Basis;
using lattice::CongruenceCondition;
using orbits::Mat2i;

// Rejection acceptance for the x-marginal (density (1-x^2)^{-1/2}); lies in
// (0,1] on |x| <= 1/2 and equals 1 at the endpoints.
inline double accept_prob_x(double x) { return std::sqrt(0.75) / std::sqrt(1.0 - x * x); }

struct ModularSurfacePoint {
    double x = 0.0, y = 1.0, theta = 0.0;
    Basis g;
};

inline ModularSurfacePoint sample_modular_surface(RngStream& rng) {
    ModularSurfacePoint pt;
    for (;;) {
        double x = rng.uniform(-0.5, 0.5);
        if (rng.uniform01() < accept_prob_x(x)) {
            pt.x = x;
            break;
        }
    }
    double floor_y = std::sqrt(1.0 - pt.x * pt.x);
    pt.y = floor_y / (1.0 - rng.uniform01());  // inverse CDF of density ~ y^-2
    pt.theta = rng.uniform01() * 2.0 * M_PI;

    double sq = std::sqrt(pt.y);
    double c = std::cos(pt.theta), s = std::sin(pt.theta);
    Basis b{1.0 / sq, pt.x / sq, 0.0, sq};
    pt.g = Basis{c, -s, s, c}.times(b);
    return pt;
}

// Uniform element of SL2(Z/NZ) by rejection on residue matrices with
// det = 1 mod N (acceptance ~ 1/N); falls back to the enumerated table if
// rejection runs unreasonably long.
inline Mat2i sample_coset(uint32_t N, RngStream& rng) {
    if (N == 0) throw std::invalid_argument("sample_coset: N must be positive");
    if (N == 1) return Mat2i::identity();
    const int64_t Nn = N;
    for (int tries = 0; tries < 64 * static_cast<int>(N); ++tries) {
        int64_t a = static_cast<int64_t>(rng.uniform_below(N));
        int64_t b = static_cast<int64_t>(rng.uniform_below(N));
        int64_t c = static_cast<int64_t>(rng.uniform_below(N));
        int64_t d = static_cast<int64_t>(rng.uniform_below(N));
        if (CongruenceCondition::mod(a * d - b * c, N) == 1 % Nn)
            return Mat2i{{{{a, b}, {c, d}}}};
    }
    if (N <= 12) {
        auto reps = orbits::coset_reps_mod_N(N);
        return reps[rng.uniform_below(reps.size())].residue;
    }
    throw std::logic_error("sample_coset: rejection failed");
}

struct LatticeSample {
    Basis g;
    Mat2i twist;  // residue matrix in SL2(Z/NZ)
    double x = 0.0, y = 1.0, theta = 0.0;
};

inline LatticeSample sample_nu_N(uint32_t N, RngStream& rng) {
    ModularSurfacePoint pt = sample_modular_surface(rng);
    LatticeSample out;
    out.g = pt.g;
    out.x = pt.x;
    out.y = pt.y;
    out.theta = pt.theta;
    out.twist = sample_coset(N, rng);
    return out;
}

struct ConeSample {
    double t = 1.0;  // in (0,1]
    LatticeSample base;
};

inline ConeSample sample_cone(uint32_t N, RngStream& rng) {
    ConeSample out;
    out.base = sample_nu_N(N, rng);
    out.t = rng.uniform_open01();
    return out;
}

// Class transport under the twist: sigma' = (u * v0 mod N, N).
inline CongruenceCondition twisted_class(const CongruenceCondition& sigma, const Mat2i& u) {
    uint32_t N = sigma.modulus;
    int64_t p = u.m[0][0] * sigma.v0[0] + u.m[0][1] * sigma.v0[1];
    int64_t q = u.m[1][0] * sigma.v0[0] + u.m[1][1] * sigma.v0[1];
    return CongruenceCondition(N, p, q);
}

}  // namespace latmom::randlat
