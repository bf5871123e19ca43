#pragma once

// Exact and high-precision arithmetic kernels: totient/Moebius, the index of
// the level-N principal congruence subgroup, restricted zeta values
//
//   zeta_N(d) = prod_{p prime, p !| N} (1 - p^-d)^-1,
//
// the partial sums sum_{n<=K, N|n} phi(n), and the determinant kernel
//
//   Phi_N(x) = |x| * sum_{n in N*Z, n >= |x|} N*phi(n) / (phi(N)*n^3),
//
// which tends to 1/(zeta_N(2)*N) as |x| -> infinity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace latmom::arith {

using int128 = __int128;

inline std::string to_string_int128(int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

// ---------------------------------------------------------------------------
// Smallest-prime-factor table for [1, limit].
// ---------------------------------------------------------------------------
class FactorTable {
  public:
    explicit FactorTable(uint32_t limit) : limit_(limit), spf_(limit + 1, 0) {
        if (limit < 1) throw std::invalid_argument("FactorTable: limit must be >= 1");
        for (uint64_t i = 2; i <= limit; ++i) {
            if (spf_[i] == 0) {
                for (uint64_t j = i; j <= limit; j += i)
                    if (spf_[j] == 0) spf_[j] = static_cast<uint32_t>(i);
            }
        }
        if (limit >= 1) spf_[1] = 1;
    }

    uint32_t limit() const { return limit_; }

    uint32_t smallest_prime_factor(uint32_t n) const {
        if (n < 1 || n > limit_) throw std::out_of_range("FactorTable: n out of range");
        return spf_[n];
    }

    bool is_prime(uint32_t n) const { return n >= 2 && smallest_prime_factor(n) == n; }

    std::vector<uint32_t> distinct_prime_factors(uint32_t n) const {
        if (n < 1 || n > limit_) throw std::out_of_range("FactorTable: n out of range");
        std::vector<uint32_t> ps;
        while (n > 1) {
            uint32_t p = spf_[n];
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
        return ps;
    }

  private:
    uint32_t limit_;
    std::vector<uint32_t> spf_;
};

// Distinct prime factors by trial division (for one-off moduli).
inline std::vector<uint64_t> distinct_prime_factors(uint64_t n) {
    std::vector<uint64_t> ps;
    for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

// #{1<=k<=n : gcd(k,n)=1}
inline uint64_t euler_phi(uint64_t n) {
    if (n == 0) throw std::domain_error("euler_phi: n must be positive");
    uint64_t result = n;
    for (uint64_t p : distinct_prime_factors(n)) result -= result / p;
    return result;
}

// phi(n) := phi(|n|) for nonzero integers, matching the determinant kernel.
inline uint64_t euler_phi_abs(int64_t n) {
    if (n == 0) throw std::domain_error("euler_phi_abs: n must be nonzero");
    return euler_phi(static_cast<uint64_t>(n < 0 ? -n : n));
}

inline int mobius(uint64_t n) {
    if (n == 0) throw std::domain_error("mobius: n must be positive");
    int sign = 1;
    for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            sign = -sign;
        }
    }
    if (n > 1) sign = -sign;
    return sign;
}

// [SL2(Z) : Gamma(N)] = N^3 * prod_{p|N} (1 - p^-2), exact.
inline uint64_t group_index(uint64_t N) {
    if (N == 0) throw std::domain_error("group_index: N must be positive");
    unsigned __int128 result = static_cast<unsigned __int128>(N) * N * N;
    for (uint64_t p : distinct_prime_factors(N)) {
        result /= p * p;
        result *= p * p - 1;
    }
    if (result > static_cast<unsigned __int128>(UINT64_MAX))
        throw std::overflow_error("group_index: overflow");
    return static_cast<uint64_t>(result);
}

// ---------------------------------------------------------------------------
// zeta_N(d) with a proven truncation bound.
//
// zeta(d) is summed to M with an Euler-Maclaurin tail; successive correction
// terms alternate for the completely monotone integrand x^-d, so the first
// omitted term bounds the remainder. The Euler product over p | N is then
// applied exactly.
// ---------------------------------------------------------------------------
struct ZetaNValue {
    uint64_t modulus = 1;
    int exponent = 2;
    double value = 0.0;
    double abs_error_bound = 0.0;
};

inline ZetaNValue zeta_N(uint64_t N, int d, double tol) {
    if (N == 0) throw std::domain_error("zeta_N: N must be positive");
    if (d < 2) throw std::invalid_argument("zeta_N: exponent must be >= 2");
    if (!(tol > 0.0)) throw std::invalid_argument("zeta_N: tol must be positive");
    if (tol < 1e-14) throw std::invalid_argument("zeta_N: tol below achievable precision");

    const int64_t M = 2000;
    double sum = 0.0, comp = 0.0;  // Kahan, ascending magnitude
    for (int64_t n = M; n >= 1; --n) {
        double term = std::pow(static_cast<double>(n), -d);
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    // Tail over n >= a = M+1: int_a^inf + f(a)/2 - f'(a)/12 + f'''(a)/720 - ...
    // Correction terms alternate for x^-d, so the first omitted one bounds the rest.
    double a = static_cast<double>(M) + 1.0;
    double dd = d;
    double zeta_val = sum + std::pow(a, 1.0 - dd) / (dd - 1.0) + 0.5 * std::pow(a, -dd) +
                      dd / 12.0 * std::pow(a, -dd - 1.0) -
                      dd * (dd + 1.0) * (dd + 2.0) / 720.0 * std::pow(a, -dd - 3.0);
    double remainder = dd * (dd + 1.0) * (dd + 2.0) * (dd + 3.0) * (dd + 4.0) / 30240.0 *
                       std::pow(a, -dd - 5.0);

    double factor = 1.0;
    for (uint64_t p : distinct_prime_factors(N))
        factor *= 1.0 - std::pow(static_cast<double>(p), -dd);

    ZetaNValue out;
    out.modulus = N;
    out.exponent = d;
    out.value = zeta_val * factor;
    out.abs_error_bound = remainder * factor + 5e-16 * (1.0 + out.value);
    if (out.abs_error_bound > tol)
        throw std::invalid_argument("zeta_N: requested tol not achieved");
    return out;
}

// ---------------------------------------------------------------------------
// S_N(m) = #{1<=l<=N*m : l = 1 mod N, gcd(l, N*m)=1}
// ---------------------------------------------------------------------------
inline uint64_t s_N_m_enumerate(uint64_t N, uint64_t m) {
    if (N == 0 || m == 0) throw std::domain_error("s_N_m_enumerate: N,m must be positive");
    uint64_t count = 0;
    for (uint64_t l = 1; l <= N * m; l += N)
        if (std::gcd(l, N * m) == 1) ++count;
    return count;
}

inline uint64_t s_N_m_formula(uint64_t N, uint64_t m) {
    if (N == 0 || m == 0) throw std::domain_error("s_N_m_formula: N,m must be positive");
    uint64_t num = euler_phi(N * m), den = euler_phi(N);
    if (num % den != 0)
        throw std::logic_error("s_N_m_formula: phi(N) does not divide phi(N*m)");
    return num / den;
}

// ---------------------------------------------------------------------------
// Segmented totient sieve: calls fn(n, phi(n)) for n in [1, limit] ascending.
// ---------------------------------------------------------------------------
template <class Fn>
void for_each_totient(uint64_t limit, Fn&& fn) {
    if (limit == 0) return;
    uint64_t root = static_cast<uint64_t>(std::sqrt(static_cast<double>(limit))) + 2;
    std::vector<uint64_t> primes;
    {
        std::vector<bool> comp(root + 1, false);
        for (uint64_t i = 2; i <= root; ++i) {
            if (!comp[i]) {
                primes.push_back(i);
                for (uint64_t j = i * i; j <= root; j += i) comp[j] = true;
            }
        }
    }
    const uint64_t seg = 1u << 19;
    std::vector<uint64_t> rem(seg), phi(seg);
    for (uint64_t lo = 1; lo <= limit; lo += seg) {
        uint64_t hi = std::min(limit, lo + seg - 1);
        uint64_t len = hi - lo + 1;
        for (uint64_t i = 0; i < len; ++i) {
            rem[i] = lo + i;
            phi[i] = 1;
        }
        for (uint64_t p : primes) {
            if (p * p > hi) break;
            uint64_t start = ((lo + p - 1) / p) * p;
            for (uint64_t n = start; n <= hi; n += p) {
                uint64_t i = n - lo;
                if (rem[i] % p == 0) {
                    uint64_t pk = 1;
                    while (rem[i] % p == 0) {
                        rem[i] /= p;
                        pk *= p;
                    }
                    phi[i] *= pk / p * (p - 1);
                }
            }
        }
        for (uint64_t i = 0; i < len; ++i) {
            uint64_t ph = phi[i];
            if (rem[i] > 1) ph *= rem[i] - 1;  // leftover prime > sqrt(limit)
            fn(lo + i, ph);
        }
    }
}

// ---------------------------------------------------------------------------
// sum_{1<=n<=K, N|n} phi(n), exact, with the leading term
// (1/(zeta_N(2)*N)) * prod_{p|N}(1-1/p) * K^2/2.
// ---------------------------------------------------------------------------
struct PhiPartialSum {
    int128 exact_sum = 0;
    double leading_term = 0.0;
};

inline PhiPartialSum phi_partial_sum(uint64_t N, uint64_t K) {
    if (N == 0) throw std::domain_error("phi_partial_sum: N must be positive");
    if (K <= 1) throw std::invalid_argument("phi_partial_sum: K must be > 1");
    if (K > (uint64_t{1} << 33))
        throw std::invalid_argument("phi_partial_sum: K too large for exact sieve");

    PhiPartialSum out;
    int128 sum = 0;
    const int128 guard = static_cast<int128>(1) << 126;
    for_each_totient(K, [&](uint64_t n, uint64_t ph) {
        if (n % N == 0) {
            sum += static_cast<int128>(ph);
            if (sum > guard) throw std::overflow_error("phi_partial_sum: overflow");
        }
    });
    out.exact_sum = sum;

    ZetaNValue z = zeta_N(N, 2, 1e-12);
    double prod = 1.0;
    for (uint64_t p : distinct_prime_factors(N)) prod *= 1.0 - 1.0 / static_cast<double>(p);
    out.leading_term = prod / (z.value * static_cast<double>(N)) *
                       static_cast<double>(K) * static_cast<double>(K) / 2.0;
    return out;
}

// ---------------------------------------------------------------------------
// Phi_N evaluator.
//
// T(y) := sum_{n in N*Z, n >= y} phi(n)/n^3 is computed as an exact sieve sum
// up to M plus the analytic tail c_N/M obtained by Abel summation from the
// partial-sum asymptotic S(t) = c_N t^2/2 + O(t log t), where
// c_N = prod_{p|N}(1-1/p) / (zeta_N(2)*N). The Abel remainder is bounded by
// A*(2.5*ln M + 1)/M^2 with envelope constant A; the build asserts
// |S(t) - c_N t^2/2| <= A/10 * t ln t at segment checkpoints, so the bound
// holds with a wide margin on the ranges we sieve.
// ---------------------------------------------------------------------------
struct PhiNValue {
    uint64_t modulus = 2;
    double argument = 0.0;
    double value = 0.0;
    double abs_error_bound = 0.0;
};

class PhiKernel {
  public:
    static constexpr double kEnvelopeA = 50.0;

    PhiKernel(uint64_t N, double x_max, double tol) : N_(N), tol_(tol) {
        if (N < 2) throw std::invalid_argument("PhiKernel: N must be >= 2");
        if (!(tol > 0.0)) throw std::invalid_argument("PhiKernel: tol must be positive");
        if (!(x_max >= 1.0)) x_max = 1.0;
        phiN_ = euler_phi(N);
        ratio_ = static_cast<double>(N) / static_cast<double>(phiN_);
        x_max_ = x_max;

        ZetaNValue z = zeta_N(N, 2, 1e-12);
        double prod = 1.0;
        for (uint64_t p : distinct_prime_factors(N)) prod *= 1.0 - 1.0 / static_cast<double>(p);
        cN_ = prod / (z.value * static_cast<double>(N));
        limit_value_ = 1.0 / (z.value * static_cast<double>(N));

        // pick M so the analytic-tail bound is below tol/2 at x = x_max
        double M_est = 1e5;
        for (int it = 0; it < 4; ++it) {
            double lnM = std::log(std::max(M_est, 3.0));
            M_est = std::sqrt(2.0 * ratio_ * x_max_ * kEnvelopeA * (2.5 * lnM + 1.0) / tol);
        }
        uint64_t M = static_cast<uint64_t>(std::max({M_est, 4.0 * x_max_, 1e5}));
        M += (N - M % N) % N;
        if (M > (uint64_t{1} << 33)) throw std::invalid_argument("PhiKernel: tol/x_max needs too large a sieve");
        M_ = M;

        uint64_t n_below = static_cast<uint64_t>(x_max_) / N;  // multiples of N <= x_max
        terms_.assign(n_below, 0.0);
        prefix_phi_over_n_.assign(n_below + 1, 0.0);

        double upper = 0.0, comp = 0.0;           // Kahan over x_max < n <= M
        long double check_S = 0.0L;               // envelope checkpoint
        for_each_totient(M_, [&](uint64_t n, uint64_t ph) {
            if (n % N_ != 0) return;
            double nd = static_cast<double>(n);
            double t = static_cast<double>(ph) / (nd * nd * nd);
            uint64_t idx = n / N_ - 1;
            if (idx < n_below) {
                terms_[idx] = t;
                prefix_phi_over_n_[idx + 1] =
                    prefix_phi_over_n_[idx] + static_cast<double>(ph) / nd;
            } else {
                double y = t - comp;
                double s = upper + y;
                comp = (s - upper) - y;
                upper = s;
            }
            check_S += static_cast<long double>(ph);
            if ((n & 0xFFFFF) == 0 && n > 4096) {
                long double dev = check_S - static_cast<long double>(cN_) * nd * nd / 2.0L;
                if (std::fabs(static_cast<double>(dev)) >
                    kEnvelopeA / 10.0 * nd * std::log(nd))
                    throw std::logic_error("PhiKernel: partial-sum envelope violated");
            }
        });

        double lnM = std::log(static_cast<double>(M_));
        tail_bound_T_ = kEnvelopeA * (2.5 * lnM + 1.0) / (static_cast<double>(M_) * static_cast<double>(M_)) +
                        z.abs_error_bound / static_cast<double>(M_) + 1e-15;
        double tail = cN_ / static_cast<double>(M_);

        suffix_.assign(n_below + 1, 0.0);
        suffix_[n_below] = upper + tail;
        for (uint64_t i = n_below; i-- > 0;) suffix_[i] = terms_[i] + suffix_[i + 1];
    }

    uint64_t modulus() const { return N_; }
    double x_max() const { return x_max_; }
    uint64_t sieve_limit() const { return M_; }

    // 1/(zeta_N(2)*N), the |x| -> infinity value.
    double limit_value() const { return limit_value_; }

    PhiNValue operator()(double x) const {
        PhiNValue out;
        out.modulus = N_;
        out.argument = x;
        double ax = std::fabs(x);
        if (ax == 0.0) return out;
        if (ax > x_max_ * (1.0 + 1e-12))
            throw std::invalid_argument("PhiKernel: |x| exceeds x_max");
        out.value = ratio_ * ax * suffix_at(ax);
        out.abs_error_bound = ratio_ * ax * tail_bound_T_;
        if (out.abs_error_bound > tol_ * (1.0 + 1e-9) * std::max(1.0, ax / x_max_))
            throw std::logic_error("PhiKernel: bound exceeds tol");
        return out;
    }

    // int_0^X Phi_N(u) du  (X >= 0), same error envelope scaled by X.
    double integral_from_zero(double X) const {
        if (!(X >= 0.0)) throw std::invalid_argument("integral_from_zero: X must be >= 0");
        if (X == 0.0) return 0.0;
        if (X > x_max_ * (1.0 + 1e-12))
            throw std::invalid_argument("integral_from_zero: X exceeds x_max");
        uint64_t below = std::min<uint64_t>(terms_.size(),
                                            static_cast<uint64_t>(std::ceil(X / static_cast<double>(N_))) - 1);
        // multiples strictly below X: n = N..N*below
        return ratio_ * (X * X / 2.0 * suffix_at(X) + 0.5 * prefix_phi_over_n_[below]);
    }

  private:
    double suffix_at(double y) const {
        uint64_t i = static_cast<uint64_t>(std::ceil(y / static_cast<double>(N_)));
        if (i == 0) i = 1;
        uint64_t idx = i - 1;  // first multiple >= y is N*i
        if (idx >= suffix_.size()) return suffix_.empty() ? 0.0 : suffix_.back();
        // guard against y slightly above N*i due to rounding
        if (static_cast<double>(N_ * i) < y && idx + 1 < suffix_.size()) ++idx;
        return suffix_[idx];
    }

    uint64_t N_, phiN_ = 1, M_ = 0;
    double ratio_ = 1.0, x_max_ = 1.0, tol_ = 1e-6;
    double cN_ = 0.0, limit_value_ = 0.0, tail_bound_T_ = 0.0;
    std::vector<double> terms_, suffix_, prefix_phi_over_n_;
};

// Cached single-point evaluation.
inline PhiNValue Phi_N(uint64_t N, double x, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("Phi_N: tol must be positive");
    double ax = std::fabs(x);
    double bucket = 10.0;
    while (bucket < ax) bucket *= 10.0;

    static std::mutex mu;
    static std::map<std::tuple<uint64_t, double, double>, std::shared_ptr<PhiKernel>> cache;
    std::shared_ptr<PhiKernel> kernel;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(N, bucket, tol);
        auto it = cache.find(key);
        if (it == cache.end()) {
            kernel = std::make_shared<PhiKernel>(N, bucket, tol);
            cache.emplace(key, kernel);
        } else {
            kernel = it->second;
        }
    }
    return (*kernel)(x);
}

}  // namespace latmom::arith
