#pragma once

// Globally adaptive 1-D quadrature on the 15-point Gauss-Kronrod rule,
// QUADPACK nodes/weights and error estimate (dqk15 + worst-interval
// bisection, no extrapolation).

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace latmom::quadrature {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated bound on |value - integral|
    bool converged = false;
    uint64_t evals = 0;
};

namespace detail {

inline constexpr double kXgk[8] = {
    .991455371120812639206854697526329, .949107912342758524526189684047851,
    .864864423359769072789712788640926, .741531185599394439863864773280788,
    .58608723546769113029414483825873,  .405845151377397166906606412076961,
    .207784955007898467600689403773245, 0.};
inline constexpr double kWgk[8] = {
    .02293532201052922496373200805897,  .063092092629978553290700663189204,
    .104790010322250183839876322541518, .140653259715525918745189590510238,
    .16900472663926790282658342659855,  .190350578064785409913256402421014,
    .204432940075298892414161999234649, .209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    .129484966168869693270611432679082, .27970539148927666790146777142378,
    .381830050505118944950369775488975, .417959183673469387755102040816327};

struct Gk15 {
    double value, err, resabs;
};

template <class F>
Gk15 gk15(const F& f, double a, double b) {
    double centr = 0.5 * (a + b), hlgth = 0.5 * (b - a);
    double fc = f(centr);
    double resg = kWg[3] * fc;
    double resk = kWgk[7] * fc;
    double resabs = kWgk[7] * std::fabs(fc);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        double absc = hlgth * kXgk[j];
        fv1[j] = f(centr - absc);
        fv2[j] = f(centr + absc);
        double fsum = fv1[j] + fv2[j];
        resk += kWgk[j] * fsum;
        resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    resasc *= std::fabs(hlgth);

    Gk15 out;
    out.value = resk * hlgth;
    out.resabs = resabs * std::fabs(hlgth);
    double abserr = std::fabs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    const double epmach = 2.22e-16;
    if (out.resabs > 1e-290) abserr = std::max(epmach * 50.0 * out.resabs, abserr);
    out.err = abserr;
    return out;
}

}  // namespace detail

inline QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                            double abs_tol = 1e-10, double rel_tol = 1e-10,
                            uint64_t max_intervals = 4000) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    struct Piece {
        double err, a, b, val;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    auto g0 = detail::gk15(f, a, b);
    out.evals = 15;
    heap.push({g0.err, a, b, g0.value});
    double total_val = g0.value, total_err = g0.err;
    uint64_t pieces = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total_val)) &&
           pieces < max_intervals) {
        Piece worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at FP resolution
            heap.push({0.0, worst.a, worst.b, worst.val});
            continue;
        }
        auto l = detail::gk15(f, worst.a, mid);
        auto r = detail::gk15(f, mid, worst.b);
        out.evals += 30;
        total_val += l.value + r.value - worst.val;
        total_err += l.err + r.err - worst.err;
        heap.push({l.err, worst.a, mid, l.value});
        heap.push({r.err, mid, worst.b, r.value});
        ++pieces;
    }
    out.value = total_val;
    out.error = total_err;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::fabs(total_val));
    return out;
}

// Integrate over a union of segments (e.g. between known breakpoints of a
// piecewise-smooth integrand); per-segment tolerances are apportioned evenly.
inline QuadResult integrate_segments(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints,
                                     double abs_tol = 1e-10, double rel_tol = 1e-10,
                                     uint64_t max_intervals_per_segment = 2000) {
    QuadResult out;
    if (breakpoints.size() < 2) throw std::invalid_argument("integrate_segments: need >= 2 points");
    size_t nseg = breakpoints.size() - 1;
    out.converged = true;
    for (size_t i = 0; i < nseg; ++i) {
        QuadResult r = integrate(f, breakpoints[i], breakpoints[i + 1],
                                 abs_tol / static_cast<double>(nseg), rel_tol,
                                 max_intervals_per_segment);
        out.value += r.value;
        out.error += r.error;
        out.evals += r.evals;
        out.converged = out.converged && r.converged;
    }
    return out;
}

}  // namespace latmom::quadrature
