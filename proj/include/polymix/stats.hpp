#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polymix/special.hpp"

namespace polymix {

inline constexpr double kZ95 = 1.959963984540054; // two-sided 95% normal quantile

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial proportion; well behaved at small
// hit counts, which is where the tail estimates live.
inline WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t trials,
                                      double z = kZ95) {
    if (trials == 0) throw std::domain_error("wilson_interval: trials must be positive");
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // endpoints are exact; clamping also absorbs roundoff at 0 and n hits
    const double low = hits == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = hits == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y = a + b x with the usual slope standard error.
inline LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("least_squares: need >= 2 matched points");
    const std::size_t m = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = m;
    if (m > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
    }
    return fit;
}

// Weighted OLS; slope stderr from the weighted residual variance.
inline LinearFit weighted_least_squares(const std::vector<double>& xs,
                                        const std::vector<double>& ys,
                                        const std::vector<double>& weights) {
    if (xs.size() != ys.size() || xs.size() != weights.size() || xs.size() < 2)
        throw std::invalid_argument("weighted_least_squares: need >= 2 matched points");
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("weighted_least_squares: weights must be positive");
        sw += weights[i];
        swx += weights[i] * xs[i];
        swy += weights[i] * ys[i];
    }
    const double mx = swx / sw, my = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += weights[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += weights[i] * (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("weighted_least_squares: degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = xs.size();
    if (xs.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            rss += weights[i] * r * r;
        }
        fit.slope_stderr =
            std::sqrt(rss / static_cast<double>(xs.size() - 2) / sxx);
    }
    return fit;
}

// Kolmogorov-Smirnov distance of studentized samples to the standard normal.
inline double ks_distance_normal(std::vector<double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("ks_distance_normal: need >= 2 samples");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    if (var == 0.0) throw std::invalid_argument("ks_distance_normal: constant samples");
    const double sd = std::sqrt(var);
    for (double& v : samples) v = (v - mean) / sd;
    std::sort(samples.begin(), samples.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double F = norm_cdf(samples[i]);
        double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        double lo = static_cast<double>(i) / static_cast<double>(n);
        dmax = std::max(dmax, std::max(std::fabs(F - hi), std::fabs(F - lo)));
    }
    return dmax;
}

// KS distance against an arbitrary CDF (exact-null one-sample test).
template <class Cdf>
inline double ks_distance(std::vector<double> samples, Cdf&& cdf) {
    const std::size_t n = samples.size();
    if (n < 1) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double F = cdf(samples[i]);
        double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        double lo = static_cast<double>(i) / static_cast<double>(n);
        dmax = std::max(dmax, std::max(std::fabs(F - hi), std::fabs(F - lo)));
    }
    return dmax;
}

// One-sample KS critical value c(alpha)/sqrt(n).
inline double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// Hill estimator of the tail index on the top fraction of order statistics;
// no bias correction, gates only coarse windows.
inline double hill_tail_index(std::vector<double> samples, double top_fraction = 0.05) {
    const std::size_t n = samples.size();
    if (n < 40) throw std::invalid_argument("hill_tail_index: need >= 40 samples");
    std::sort(samples.begin(), samples.end(), std::greater<double>());
    auto m = static_cast<std::size_t>(std::floor(top_fraction * static_cast<double>(n)));
    m = std::max<std::size_t>(m, 1);
    if (m + 1 > n) m = n - 1;
    const double threshold = samples[m];
    if (!(threshold > 0.0))
        throw std::invalid_argument("hill_tail_index: nonpositive tail threshold");
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += std::log(samples[i] / threshold);
    if (acc == 0.0) throw std::invalid_argument("hill_tail_index: degenerate tail");
    return static_cast<double>(m) / acc;
}

// Pearson chi-square statistic against expected counts.
inline double chi2_statistic(const std::vector<double>& observed,
                             const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi2_statistic: mismatched bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("chi2_statistic: empty expected bin");
        double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    return stat;
}

} // namespace polymix
