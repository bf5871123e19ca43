#pragma once

// Congruence classes of primitive vectors and exact lattice-point counting.
//
// enumerate_points counts integer vectors v with g*v inside a region,
// optionally restricted to primitive vectors or to one congruence class
// sigma = (v0, N). The iteration domain is the preimage of the region's
// bounding box under g^-1, inflated by one integer step against rounding.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "latmom/geometry.hpp"
#include "latmom/parallel.hpp"

namespace latmom::lattice {

inline bool is_primitive(int64_t p, int64_t q) {
    return std::gcd(p < 0 ? -p : p, q < 0 ? -q : q) == 1;
}

// sigma = (v0, N) with gcd(v0_1, v0_2, N) = 1; residues stored reduced mod N.
struct CongruenceCondition {
    uint32_t modulus = 1;
    std::array<int64_t, 2> v0 = {0, 0};

    CongruenceCondition() = default;
    CongruenceCondition(uint32_t N, int64_t p0, int64_t q0) : modulus(N) {
        if (N == 0) throw std::invalid_argument("CongruenceCondition: N must be positive");
        v0 = {mod(p0, N), mod(q0, N)};
        int64_t g = std::gcd(std::gcd(v0[0], v0[1]), static_cast<int64_t>(N));
        if (g != 1)
            throw std::invalid_argument("CongruenceCondition: gcd(v0, N) must be 1");
    }

    bool matches(int64_t p, int64_t q) const {
        return mod(p, modulus) == v0[0] && mod(q, modulus) == v0[1];
    }

    static int64_t mod(int64_t a, uint32_t N) {
        int64_t m = a % static_cast<int64_t>(N);
        return m < 0 ? m + N : m;
    }
};

inline bool in_class(int64_t p, int64_t q, const CongruenceCondition& sigma) {
    return is_primitive(p, q) && sigma.matches(p, q);
}

// All classes (m,n) mod N with gcd(m,n,N)=1; the count is
// N^2 * prod_{p|N} (1 - 1/p^2).
inline std::vector<CongruenceCondition> list_congruence_classes(uint32_t N) {
    if (N == 0) throw std::invalid_argument("list_congruence_classes: N must be positive");
    std::vector<CongruenceCondition> out;
    for (int64_t m = 0; m < N; ++m)
        for (int64_t n = 0; n < N; ++n)
            if (std::gcd(std::gcd(m, n), static_cast<int64_t>(N)) == 1)
                out.emplace_back(N, m, n);
    return out;
}

// Real 2x2 matrix [[a,b],[c,d]] acting on column vectors; columns are the
// lattice basis.
struct Basis {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }

    std::array<double, 2> apply(double p, double q) const {
        return {a * p + b * q, c * p + d * q};
    }

    Basis inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    Basis times(const Basis& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    static Basis identity() { return {}; }
};

enum class PointFilter { All, Primitive, Class };

struct EnumerationResult {
    uint64_t count = 0;
    std::vector<std::array<int64_t, 2>> points;  // filled only when collecting
};

struct EnumerateOptions {
    PointFilter filter = PointFilter::Primitive;
    std::optional<CongruenceCondition> sigma;  // required for PointFilter::Class
    double point_scale = 1.0;  // membership tested for point_scale * (g v)
    bool collect_points = false;
    unsigned threads = 1;
};

inline EnumerationResult enumerate_points(const Basis& g, const geometry::Region& region,
                                          const EnumerateOptions& opt) {
    if (!geometry::region_is_bounded(region))
        throw std::invalid_argument("enumerate_points: region is unbounded");
    if (std::fabs(g.det()) < 1e-12)
        throw std::invalid_argument("enumerate_points: basis is singular");
    if (opt.filter == PointFilter::Class && !opt.sigma)
        throw std::invalid_argument("enumerate_points: class filter needs sigma");
    if (!(opt.point_scale > 0.0))
        throw std::invalid_argument("enumerate_points: point_scale must be positive");

    geometry::BoundingBox bb = geometry::region_bbox(region);
    double s = opt.point_scale;
    Basis inv = g.inverse();

    // Preimage of the (scaled) bounding box: a parallelogram with corners
    // inv * (corner / s).
    std::array<std::array<double, 2>, 4> corners;
    int k = 0;
    for (double X : {bb.x_lo / s, bb.x_hi / s})
        for (double Y : {bb.y_lo / s, bb.y_hi / s}) corners[k++] = inv.apply(X, Y);

    double qmin_d = HUGE_VAL, qmax_d = -HUGE_VAL;
    for (const auto& c : corners) {
        qmin_d = std::min(qmin_d, c[1]);
        qmax_d = std::max(qmax_d, c[1]);
    }
    int64_t q_lo = static_cast<int64_t>(std::floor(qmin_d)) - 1;
    int64_t q_hi = static_cast<int64_t>(std::ceil(qmax_d)) + 1;

    const uint32_t N = opt.sigma ? opt.sigma->modulus : 1;
    const bool class_filter = opt.filter == PointFilter::Class;
    int64_t step = class_filter ? N : 1;
    if (class_filter) {
        // align q_lo to the class residue
        int64_t r = CongruenceCondition::mod(q_lo, N);
        int64_t want = opt.sigma->v0[1];
        q_lo += (want - r + N) % N;
    }
    if (q_lo > q_hi) return {};

    // Row p-range from the parallelogram edges at height q, inflated by 1.
    // Edges connect corner pairs (0,1),(0,2),(1,3),(2,3) in the XY loop order.
    auto row_range = [&](int64_t q, int64_t& p_lo, int64_t& p_hi) -> bool {
        double lo = HUGE_VAL, hi = -HUGE_VAL;
        static constexpr int edges[4][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
        double qd = static_cast<double>(q);
        for (const auto& e : edges) {
            const auto &u = corners[e[0]], &v = corners[e[1]];
            double y0 = u[1], y1 = v[1];
            if ((qd < std::min(y0, y1)) || (qd > std::max(y0, y1))) continue;
            double x;
            if (y0 == y1) {
                lo = std::min({lo, u[0], v[0]});
                hi = std::max({hi, u[0], v[0]});
                continue;
            }
            x = u[0] + (v[0] - u[0]) * (qd - y0) / (y1 - y0);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (lo > hi) return false;
        p_lo = static_cast<int64_t>(std::floor(lo)) - 1;
        p_hi = static_cast<int64_t>(std::ceil(hi)) + 1;
        return true;
    };

    uint64_t n_rows = static_cast<uint64_t>((q_hi - q_lo) / step) + 1;
    unsigned threads = std::max(1u, opt.threads);
    std::vector<uint64_t> row_counts(n_rows, 0);
    std::vector<std::vector<std::array<int64_t, 2>>> row_points(
        opt.collect_points ? n_rows : 0);

    auto work = [&](uint64_t row_begin, uint64_t row_end) {
        for (uint64_t row = row_begin; row < row_end; ++row) {
            int64_t q = q_lo + static_cast<int64_t>(row) * step;
            int64_t p_lo, p_hi;
            if (!row_range(q, p_lo, p_hi)) continue;
            if (class_filter) {
                int64_t r = CongruenceCondition::mod(p_lo, N);
                p_lo += (opt.sigma->v0[0] - r + N) % N;
            }
            uint64_t cnt = 0;
            for (int64_t p = p_lo; p <= p_hi; p += step) {
                auto w = g.apply(static_cast<double>(p), static_cast<double>(q));
                if (!geometry::region_contains(region, s * w[0], s * w[1])) continue;
                if (opt.filter != PointFilter::All && !is_primitive(p, q)) continue;
                ++cnt;
                if (opt.collect_points) row_points[row].push_back({p, q});
            }
            row_counts[row] = cnt;
        }
    };
    parallel_for(n_rows, threads, work);

    EnumerationResult out;
    for (uint64_t row = 0; row < n_rows; ++row) out.count += row_counts[row];
    if (opt.collect_points) {
        out.points.reserve(out.count);
        for (auto& rp : row_points)
            out.points.insert(out.points.end(), rp.begin(), rp.end());
    }
    return out;
}

// Count-only convenience.
inline uint64_t count_points(const Basis& g, const geometry::Region& region,
                             PointFilter filter,
                             std::optional<CongruenceCondition> sigma = std::nullopt,
                             double point_scale = 1.0, unsigned threads = 1) {
    EnumerateOptions opt;
    opt.filter = filter;
    opt.sigma = std::move(sigma);
    opt.point_scale = point_scale;
    opt.threads = threads;
    return enumerate_points(g, region, opt).count;
}

}  // namespace latmom::lattice
