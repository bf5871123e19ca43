#pragma once

// Borel test regions with exact membership and exact (or error-bounded)
// areas. Membership on boundaries is closed (<=) for Disk/Rect/Annulus; the
// KhintchineBox uses the strict inequality |x| < psi(|y|) and excludes the
// line y = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "latmom/quadrature.hpp"

namespace latmom::geometry {

// ---------------------------------------------------------------------------
// psi functions
// ---------------------------------------------------------------------------
struct PowerLawPsi {
    double c = 1.0;      // psi(t) = c * t^-alpha
    double alpha = 0.5;
};

// Right-continuous step function: value(t) = values[i] on
// [breakpoints[i], breakpoints[i+1]); clamped at both ends.
struct TablePsi {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

using PsiSpec = std::variant<PowerLawPsi, TablePsi>;

inline double psi_value(const PsiSpec& psi, double t) {
    if (!(t > 0.0)) throw std::domain_error("psi_value: t must be positive");
    if (const auto* p = std::get_if<PowerLawPsi>(&psi))
        return p->c * std::pow(t, -p->alpha);
    const auto& tab = std::get<TablePsi>(psi);
    if (tab.breakpoints.empty() || tab.breakpoints.size() != tab.values.size())
        throw std::invalid_argument("TablePsi: malformed");
    auto it = std::upper_bound(tab.breakpoints.begin(), tab.breakpoints.end(), t);
    if (it == tab.breakpoints.begin()) return tab.values.front();
    return tab.values[static_cast<size_t>(it - tab.breakpoints.begin()) - 1];
}

inline bool psi_non_increasing(const PsiSpec& psi) {
    if (const auto* p = std::get_if<PowerLawPsi>(&psi)) return p->alpha >= 0.0 && p->c > 0.0;
    const auto& tab = std::get<TablePsi>(psi);
    for (size_t i = 1; i < tab.values.size(); ++i)
        if (tab.values[i] > tab.values[i - 1]) return false;
    return true;
}

// Whether sum_{t>=1} psi(t) diverges (Khintchine hypothesis).
inline bool psi_sum_diverges(const PsiSpec& psi) {
    if (const auto* p = std::get_if<PowerLawPsi>(&psi)) return p->alpha <= 1.0 && p->c > 0.0;
    return std::get<TablePsi>(psi).values.back() > 0.0;
}

inline double psi_sum(const PsiSpec& psi, uint64_t T) {
    double s = 0.0, comp = 0.0;
    for (uint64_t t = 1; t <= T; ++t) {
        double y = psi_value(psi, static_cast<double>(t)) - comp;
        double tot = s + y;
        comp = (tot - s) - y;
        s = tot;
    }
    return s;
}

// Exact integral of psi over [a,b], 0 <= a <= b (test oracle and analytic head).
inline double psi_integral_exact(const PsiSpec& psi, double a, double b) {
    if (!(0.0 <= a && a <= b)) throw std::invalid_argument("psi_integral_exact: bad range");
    if (const auto* p = std::get_if<PowerLawPsi>(&psi)) {
        if (p->alpha == 1.0) {
            if (a == 0.0) throw std::domain_error("psi_integral_exact: divergent at 0");
            return p->c * (std::log(b) - std::log(a));
        }
        if (p->alpha > 1.0 && a == 0.0)
            throw std::domain_error("psi_integral_exact: divergent at 0");
        double e = 1.0 - p->alpha;
        return p->c / e * (std::pow(b, e) - std::pow(a, e));
    }
    const auto& tab = std::get<TablePsi>(psi);
    double total = 0.0;
    for (size_t i = 0; i < tab.values.size(); ++i) {
        double seg_lo = (i == 0) ? 0.0 : tab.breakpoints[i];
        double seg_hi = (i + 1 < tab.breakpoints.size()) ? tab.breakpoints[i + 1] : HUGE_VAL;
        double lo = std::max(a, seg_lo), hi = std::min(b, seg_hi);
        if (hi > lo) total += tab.values[i] * (hi - lo);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------
struct Disk {
    double radius = 1.0;
};
struct Rect {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
};
struct Annulus {
    double r_in = 0.5, r_out = 1.0;
};
// {(x,y): y_min <= |y| <= T (y != 0), |x| < psi(|y|)}
struct KhintchineBox {
    PsiSpec psi;
    double T = 1.0;
    double y_min = 0.0;
};

using Region = std::variant<Disk, Rect, Annulus, KhintchineBox>;

struct BoundingBox {
    double x_lo, x_hi, y_lo, y_hi;
};

struct ValueWithError {
    double value = 0.0;
    double abs_error_bound = 0.0;
};

inline bool region_is_bounded(const Region& region) {
    if (const auto* kb = std::get_if<KhintchineBox>(&region)) {
        if (kb->y_min > 0.0) return true;
        if (const auto* p = std::get_if<PowerLawPsi>(&kb->psi)) return p->alpha == 0.0;
        return true;  // table psi is bounded by its first value
    }
    return true;
}

inline bool region_contains(const Region& region, double x, double y) {
    if (const auto* d = std::get_if<Disk>(&region))
        return x * x + y * y <= d->radius * d->radius;
    if (const auto* r = std::get_if<Rect>(&region))
        return r->x_lo <= x && x <= r->x_hi && r->y_lo <= y && y <= r->y_hi;
    if (const auto* a = std::get_if<Annulus>(&region)) {
        double s = x * x + y * y;
        return a->r_in * a->r_in <= s && s <= a->r_out * a->r_out;
    }
    const auto& kb = std::get<KhintchineBox>(region);
    double ay = std::fabs(y);
    if (ay == 0.0 || ay < kb.y_min || ay > kb.T) return false;
    return std::fabs(x) < psi_value(kb.psi, ay);
}

inline BoundingBox region_bbox(const Region& region) {
    if (!region_is_bounded(region))
        throw std::invalid_argument("region_bbox: region is unbounded");
    if (const auto* d = std::get_if<Disk>(&region))
        return {-d->radius, d->radius, -d->radius, d->radius};
    if (const auto* r = std::get_if<Rect>(&region)) return {r->x_lo, r->x_hi, r->y_lo, r->y_hi};
    if (const auto* a = std::get_if<Annulus>(&region))
        return {-a->r_out, a->r_out, -a->r_out, a->r_out};
    const auto& kb = std::get<KhintchineBox>(region);
    double x_sup;
    if (const auto* p = std::get_if<PowerLawPsi>(&kb.psi))
        x_sup = kb.y_min > 0.0 ? psi_value(kb.psi, kb.y_min) : p->c;
    else {
        const auto& tab = std::get<TablePsi>(kb.psi);
        x_sup = *std::max_element(tab.values.begin(), tab.values.end());
    }
    return {-x_sup, x_sup, -kb.T, kb.T};
}

inline ValueWithError region_area(const Region& region) {
    if (const auto* d = std::get_if<Disk>(&region))
        return {M_PI * d->radius * d->radius, 0.0};
    if (const auto* r = std::get_if<Rect>(&region)) {
        if (r->x_hi < r->x_lo || r->y_hi < r->y_lo) return {0.0, 0.0};
        return {(r->x_hi - r->x_lo) * (r->y_hi - r->y_lo), 0.0};
    }
    if (const auto* a = std::get_if<Annulus>(&region))
        return {M_PI * (a->r_out * a->r_out - a->r_in * a->r_in), 0.0};

    // KhintchineBox: 2 * int_{y_min}^{T} 2 psi(y) dy. A power-law singularity
    // at 0 is handled by an exact head on [0, eps].
    const auto& kb = std::get<KhintchineBox>(region);
    if (!(kb.T > kb.y_min)) return {0.0, 0.0};
    double head = 0.0, lo = kb.y_min;
    if (const auto* p = std::get_if<PowerLawPsi>(&kb.psi)) {
        if (lo == 0.0 && p->alpha > 0.0) {
            if (p->alpha >= 1.0)
                throw std::domain_error("region_area: KhintchineBox area diverges");
            double eps = std::min(kb.T, 1e-3);
            head = psi_integral_exact(kb.psi, 0.0, eps);
            lo = eps;
        }
    }
    auto r = quadrature::integrate(
        [&](double y) { return psi_value(kb.psi, y); }, lo, kb.T, 1e-12, 1e-12);
    return {4.0 * (head + r.value), 4.0 * (r.error + 1e-16 * head)};
}

// vol(A intersect -A); exact for the shapes in play.
inline double negated_overlap_area(const Region& region) {
    if (const auto* r = std::get_if<Rect>(&region)) {
        double w = std::min(r->x_hi, -r->x_lo) - std::max(r->x_lo, -r->x_hi);
        double h = std::min(r->y_hi, -r->y_lo) - std::max(r->y_lo, -r->y_hi);
        if (w <= 0.0 || h <= 0.0) return 0.0;
        return w * h;
    }
    return region_area(region).value;  // Disk/Annulus/KhintchineBox are symmetric
}

// sup |det(v1,v2)| over v1,v2 in the region (exact for disks/annuli/rects;
// a safe upper bound for boxes). Determinant terms with |n| above this vanish.
inline double max_abs_det(const Region& region) {
    if (const auto* d = std::get_if<Disk>(&region)) return d->radius * d->radius;
    if (const auto* a = std::get_if<Annulus>(&region)) return a->r_out * a->r_out;
    if (const auto* r = std::get_if<Rect>(&region)) {
        std::array<std::array<double, 2>, 4> c = {{{r->x_lo, r->y_lo},
                                                   {r->x_lo, r->y_hi},
                                                   {r->x_hi, r->y_lo},
                                                   {r->x_hi, r->y_hi}}};
        double best = 0.0;
        for (const auto& u : c)
            for (const auto& v : c)
                best = std::max(best, std::fabs(u[0] * v[1] - u[1] * v[0]));
        return best;
    }
    BoundingBox bb = region_bbox(region);
    double r2 = std::max(bb.x_hi * bb.x_hi, bb.x_lo * bb.x_lo) +
                std::max(bb.y_hi * bb.y_hi, bb.y_lo * bb.y_lo);
    return r2;
}

// ---------------------------------------------------------------------------
// Chords: parameter intervals {t : P + t*D in region}. Supported for
// Disk/Rect/Annulus (the shapes used by the eta quadrature).
// ---------------------------------------------------------------------------
struct Interval {
    double lo, hi;
};

namespace detail {

inline bool line_circle(double px, double py, double dx, double dy, double R,
                        double& t0, double& t1) {
    double a = dx * dx + dy * dy;
    double b = 2.0 * (px * dx + py * dy);
    double c = px * px + py * py - R * R;
    double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return false;
    double s = std::sqrt(disc);
    t0 = (-b - s) / (2.0 * a);
    t1 = (-b + s) / (2.0 * a);
    return true;
}

}  // namespace detail

inline std::vector<Interval> line_chords(const Region& region, double px, double py,
                                         double dx, double dy) {
    std::vector<Interval> out;
    if (const auto* d = std::get_if<Disk>(&region)) {
        double t0, t1;
        if (detail::line_circle(px, py, dx, dy, d->radius, t0, t1)) out.push_back({t0, t1});
        return out;
    }
    if (const auto* r = std::get_if<Rect>(&region)) {
        double lo = -HUGE_VAL, hi = HUGE_VAL;
        auto clip = [&](double p, double dir, double a, double b) {
            if (dir == 0.0) return p >= a && p <= b;
            double u = (a - p) / dir, v = (b - p) / dir;
            if (u > v) std::swap(u, v);
            lo = std::max(lo, u);
            hi = std::min(hi, v);
            return true;
        };
        if (!clip(px, dx, r->x_lo, r->x_hi) || !clip(py, dy, r->y_lo, r->y_hi)) return out;
        if (lo < hi) out.push_back({lo, hi});
        return out;
    }
    if (const auto* a = std::get_if<Annulus>(&region)) {
        double o0, o1;
        if (!detail::line_circle(px, py, dx, dy, a->r_out, o0, o1)) return out;
        double i0, i1;
        if (a->r_in > 0.0 && detail::line_circle(px, py, dx, dy, a->r_in, i0, i1)) {
            if (i0 > o0) out.push_back({o0, i0});
            if (o1 > i1) out.push_back({i1, o1});
        } else {
            out.push_back({o0, o1});
        }
        return out;
    }
    throw std::invalid_argument("line_chords: unsupported region kind");
}

// Euclidean chord length along the unit direction (dx,dy).
inline double chord_length(const Region& region, double px, double py, double dx,
                           double dy) {
    double total = 0.0;
    for (const Interval& iv : line_chords(region, px, py, dx, dy)) total += iv.hi - iv.lo;
    return total;
}

}  // namespace latmom::geometry
