#pragma once

// End-to-end counting experiments: random lattice counts against the
// area/(zeta_N(2) N^2) prediction with the V^{1/2} (log V)^2 error envelope,
// and congruence-constrained Khintchine counting.
//
// Khintchine prediction: the count over both signs of q with the strict
// window |qx - p| < psi(|q|) corresponds to the Borel family
// {|u| < psi(|w|), |w| <= T} of area 4*Int psi, so
//
//   predicted(T) = 4 * sum_{1<=t<=T} psi(t) / (zeta_N(2) N^2).

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "latmom/arith.hpp"
#include "latmom/geometry.hpp"
#include "latmom/lattice.hpp"
#include "latmom/parallel.hpp"
#include "latmom/randlat.hpp"
#include "latmom/rng.hpp"

namespace latmom::experiments {

using geometry::PsiSpec;
using lattice::Basis;
using lattice::CongruenceCondition;

// ---------------------------------------------------------------------------
// Increasing region families
// ---------------------------------------------------------------------------
struct RegionFamily {
    enum class Shape { Disk, Rect } shape = Shape::Disk;
    double rect_aspect = 1.0;  // height/width for Shape::Rect
    std::vector<double> volumes;

    geometry::Region region_for_volume(double v) const {
        if (!(v >= 0.0)) throw std::invalid_argument("region_for_volume: negative volume");
        if (shape == Shape::Disk) return geometry::Disk{std::sqrt(v / M_PI)};
        double w = std::sqrt(v / rect_aspect), h = rect_aspect * w;
        return geometry::Rect{-w / 2, w / 2, -h / 2, h / 2};
    }

    void validate() const {
        if (volumes.empty()) throw std::invalid_argument("RegionFamily: no volumes");
        for (size_t i = 1; i < volumes.size(); ++i)
            if (!(volumes[i] > volumes[i - 1]))
                throw std::invalid_argument("RegionFamily: volumes must strictly increase");
        if (shape == Shape::Rect && !(rect_aspect > 0.0))
            throw std::invalid_argument("RegionFamily: aspect must be positive");
    }
};

struct SchmidtRecord {
    uint64_t seed = 0;
    uint64_t lattice_id = 0;
    double volume = 0.0;
    uint64_t count = 0;
    double predicted = 0.0;
    double normalized_error = 0.0;  // |count - predicted| / (V^0.5 (ln V)^2 psi(V)^0.5)
};

using LatticeSource = std::variant<uint64_t /*seeded count*/, std::vector<Basis>>;

// Exact class counts on sampled (or given) lattices over an increasing
// family, one record per (lattice, volume). The optional psi supplies the
// non-decreasing factor in the error normalization (defaults to 1).
inline std::vector<SchmidtRecord> schmidt_experiment(
    uint32_t N, const CongruenceCondition& sigma, const RegionFamily& family,
    const LatticeSource& lattices, uint64_t seed,
    const std::optional<PsiSpec>& psi = std::nullopt, unsigned threads = 1) {
    family.validate();
    if (sigma.modulus != N) throw std::invalid_argument("schmidt_experiment: sigma mismatch");
    arith::ZetaNValue z = arith::zeta_N(N, 2, 1e-12);
    double density = 1.0 / (z.value * static_cast<double>(N) * static_cast<double>(N));

    struct Job {
        Basis g;
        CongruenceCondition cls;
        uint64_t id;
    };
    std::vector<Job> jobs;
    if (const auto* L = std::get_if<uint64_t>(&lattices)) {
        for (uint64_t i = 0; i < *L; ++i) {
            RngStream rng(seed, substream(StreamTag::kSchmidt, i));
            randlat::LatticeSample s = randlat::sample_nu_N(N, rng);
            jobs.push_back({s.g, randlat::twisted_class(sigma, s.twist), i});
        }
    } else {
        const auto& bases = std::get<std::vector<Basis>>(lattices);
        for (uint64_t i = 0; i < bases.size(); ++i) jobs.push_back({bases[i], sigma, i});
    }

    std::vector<SchmidtRecord> rows(jobs.size() * family.volumes.size());
    parallel_for(jobs.size(), threads, [&](uint64_t b, uint64_t e) {
        for (uint64_t j = b; j < e; ++j) {
            for (size_t k = 0; k < family.volumes.size(); ++k) {
                double V = family.volumes[k];
                SchmidtRecord rec;
                rec.seed = seed;
                rec.lattice_id = jobs[j].id;
                rec.volume = V;
                rec.count = V == 0.0 ? 0
                                     : lattice::count_points(
                                           jobs[j].g, family.region_for_volume(V),
                                           lattice::PointFilter::Class, jobs[j].cls);
                rec.predicted = V * density;
                double env = std::sqrt(V) * std::pow(std::log(V), 2);
                if (psi) env *= std::sqrt(geometry::psi_value(*psi, V));
                rec.normalized_error =
                    env > 0.0 ? std::fabs(static_cast<double>(rec.count) - rec.predicted) / env
                              : 0.0;
                rows[j * family.volumes.size() + k] = rec;
            }
        }
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Khintchine counting
// ---------------------------------------------------------------------------
struct KhintchineRecord {
    uint64_t seed = 0;
    double x = 0.0;
    uint64_t T = 0;
    uint64_t count = 0;
    double predicted = 0.0;
    double ratio = 0.0;
};

struct KhintchineResult {
    std::vector<KhintchineRecord> rows;
    bool divergence_warning = false;  // psi sum converges: hypothesis violated
};

// #{(p,q) primitive, == (p0,q0) mod N, 1 <= |q| <= T, |qx-p| < psi(|q|)},
// by rounding qx into the window for each q.
inline uint64_t khintchine_count(double x, uint64_t T, const PsiSpec& psi,
                                 const CongruenceCondition& sigma) {
    uint64_t count = 0;
    for (uint64_t q = 1; q <= T; ++q) {
        double w = geometry::psi_value(psi, static_cast<double>(q));
        for (int64_t qq : {static_cast<int64_t>(q), -static_cast<int64_t>(q)}) {
            double center = static_cast<double>(qq) * x;
            int64_t p_lo = static_cast<int64_t>(std::floor(center - w)) ;
            int64_t p_hi = static_cast<int64_t>(std::ceil(center + w));
            for (int64_t p = p_lo; p <= p_hi; ++p) {
                if (!(std::fabs(center - static_cast<double>(p)) < w)) continue;
                if (!lattice::is_primitive(p, qq)) continue;
                if (!sigma.matches(p, qq)) continue;
                ++count;
            }
        }
    }
    return count;
}

using XSource = std::variant<uint64_t /*seeded count*/, std::vector<double>>;

inline KhintchineResult khintchine_experiment(uint32_t N, const CongruenceCondition& sigma,
                                              const PsiSpec& psi,
                                              const std::vector<uint64_t>& T_list,
                                              const XSource& x_source, uint64_t seed,
                                              unsigned threads = 1) {
    if (sigma.modulus != N) throw std::invalid_argument("khintchine_experiment: sigma mismatch");
    if (!geometry::psi_non_increasing(psi))
        throw std::invalid_argument("khintchine_experiment: psi must be non-increasing");
    for (size_t i = 1; i < T_list.size(); ++i)
        if (T_list[i] <= T_list[i - 1])
            throw std::invalid_argument("khintchine_experiment: T_list must increase");

    KhintchineResult out;
    out.divergence_warning = !geometry::psi_sum_diverges(psi);

    std::vector<double> xs;
    if (const auto* n = std::get_if<uint64_t>(&x_source)) {
        for (uint64_t i = 0; i < *n; ++i) {
            RngStream rng(seed, substream(StreamTag::kKhintchine, i));
            xs.push_back(rng.uniform_open01());
        }
    } else {
        xs = std::get<std::vector<double>>(x_source);
    }

    arith::ZetaNValue z = arith::zeta_N(N, 2, 1e-12);
    double density = 1.0 / (z.value * static_cast<double>(N) * static_cast<double>(N));

    out.rows.resize(xs.size() * T_list.size());
    parallel_for(xs.size(), threads, [&](uint64_t b, uint64_t e) {
        for (uint64_t i = b; i < e; ++i) {
            for (size_t k = 0; k < T_list.size(); ++k) {
                KhintchineRecord rec;
                rec.seed = seed;
                rec.x = xs[i];
                rec.T = T_list[k];
                rec.count = rec.T == 0 ? 0 : khintchine_count(xs[i], rec.T, psi, sigma);
                rec.predicted =
                    4.0 * geometry::psi_sum(psi, rec.T) * density;
                rec.ratio = rec.predicted > 0.0
                                ? static_cast<double>(rec.count) / rec.predicted
                                : 0.0;
                out.rows[i * T_list.size() + k] = rec;
            }
        }
    });
    return out;
}

}  // namespace latmom::experiments
