#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace latmom {

// Pairwise (cascade) summation. Deterministic for a fixed input order and
// independent of how the work was produced, so reports stay bit-stable
// across worker counts.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample_std / sqrt(n)
    double variance = 0.0; // unbiased
    uint64_t n = 0;
};

inline MeanStderr mean_and_stderr(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("mean_and_stderr: need n >= 2");
    MeanStderr r;
    r.n = xs.size();
    r.mean = pairwise_sum(xs) / static_cast<double>(r.n);
    std::vector<double> sq(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        double d = xs[i] - r.mean;
        sq[i] = d * d;
    }
    r.variance = pairwise_sum(sq) / static_cast<double>(r.n - 1);
    r.stderr_ = std::sqrt(r.variance / static_cast<double>(r.n));
    return r;
}

namespace detail {

// Regularized incomplete gamma, lower P(a,x) by series, upper Q(a,x) by
// Lentz continued fraction.
inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Q(a,x) = Gamma(a,x)/Gamma(a)
inline double regularized_gamma_upper(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_upper: bad args");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

// Survival function of the chi-squared distribution with k dof.
inline double chi_squared_sf(double x, double k) {
    return regularized_gamma_upper(k / 2.0, x / 2.0);
}

// Pearson chi-squared statistic for equiprobable cells.
inline double chi_squared_stat(std::span<const uint64_t> observed, double expected_each) {
    double stat = 0.0;
    for (uint64_t o : observed) {
        double d = static_cast<double>(o) - expected_each;
        stat += d * d / expected_each;
    }
    return stat;
}

// One-sample Kolmogorov-Smirnov statistic against an analytic CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Asymptotic KS critical value at significance alpha.
inline double ks_critical(double alpha, uint64_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0) / static_cast<double>(n));
}

}  // namespace latmom
