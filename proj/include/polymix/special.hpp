#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace polymix {

// Riemann zeta for real s > 1 by Euler-Maclaurin: partial sum to N, integral
// tail N^{1-s}/(s-1), then correction terms with a rigorous remainder bound.
// The cutoff N grows until the first omitted term is below tol/2.
inline double zeta(double s, double tol = 1e-12) {
    if (!(s > 1.0)) throw std::domain_error("zeta: requires s > 1");
    if (!(tol > 0.0)) throw std::domain_error("zeta: requires tol > 0");

    auto em_error = [s](double N) {
        // first omitted Euler-Maclaurin term (B_6 level)
        return s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 30240.0 *
               std::pow(N, -s - 5.0);
    };
    std::uint64_t N = 16;
    while (em_error(static_cast<double>(N)) > 0.5 * tol && N < (1ULL << 22)) N *= 2;

    double sum = 0.0;
    for (std::uint64_t n = N; n >= 1; --n) // ascending magnitude
        sum += std::pow(static_cast<double>(n), -s);

    const double Nd = static_cast<double>(N);
    double tail = std::pow(Nd, 1.0 - s) / (s - 1.0)       // integral tail
                  - 0.5 * std::pow(Nd, -s)                 // half correction
                  + s / 12.0 * std::pow(Nd, -s - 1.0)
                  - s * (s + 1) * (s + 2) / 720.0 * std::pow(Nd, -s - 3.0);
    return sum + tail;
}

// Tail sum sum_{j >= m} j^{-s} for s > 1, m >= 1. Exact partial sum over a
// short window, Euler-Maclaurin for the rest; no cancellation at large m.
inline double power_tail_sum(double s, std::uint64_t m) {
    if (!(s > 1.0)) throw std::domain_error("power_tail_sum: requires s > 1");
    if (m < 1) m = 1;
    const std::uint64_t cut = m + 64;
    double sum = 0.0;
    for (std::uint64_t j = cut - 1; j >= m; --j)
        sum += std::pow(static_cast<double>(j), -s);
    const double c = static_cast<double>(cut);
    sum += std::pow(c, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(c, -s) +
           s / 12.0 * std::pow(c, -s - 1.0) -
           s * (s + 1) * (s + 2) / 720.0 * std::pow(c, -s - 3.0);
    return sum;
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Euler Beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b).
inline double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Chi-square upper quantile via Wilson-Hilferty; adequate for gating tests.
inline double chi2_quantile(double prob, double dof) {
    if (!(prob > 0.0 && prob < 1.0) || !(dof > 0.0))
        throw std::domain_error("chi2_quantile: bad arguments");
    // normal quantile by Acklam-style rational approximation
    auto norm_quantile = [](double p) {
        static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
        static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
        static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
        static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
        const double plow = 0.02425, phigh = 1 - plow;
        double q, r;
        if (p < plow) {
            q = std::sqrt(-2 * std::log(p));
            return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        if (p > phigh) {
            q = std::sqrt(-2 * std::log(1 - p));
            return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    };
    double z = norm_quantile(prob);
    double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
    return dof * t * t * t;
}

// Adaptive Simpson on [a,b]; used as an independent quadrature oracle.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 40) {
    auto simpson = [&](double lo, double hi) {
        double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    };
    std::function<double(double, double, double, int)> rec =
        [&](double lo, double hi, double whole, int d) -> double {
        double mid = 0.5 * (lo + hi);
        double left = simpson(lo, mid), right = simpson(mid, hi);
        if (d <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
    };
    return rec(a, b, simpson(a, b), depth);
}

} // namespace polymix
