#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymix/chains.hpp"
#include "polymix/special.hpp"
#include "polymix/stats.hpp"

namespace polymix {

// Slope/intercept/stderr of a log-log regression; shared by the mixing-rate
// and tail-scaling fits.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t points_used = 0;
};

// ---------------------------------------------------------------------------
// Finite (or discretized) transition kernels. The renewal and Harris kernels
// are structured, so K f costs O(states) instead of O(states^2).
// ---------------------------------------------------------------------------
class FiniteKernel {
public:
    enum class Layout { dense, renewal_shift, harris_diag_rank1 };

    std::vector<double> pi;            // stationary weights per state
    double discretization_error = 0.0; // 0 for genuinely finite chains

    static FiniteKernel dense(std::vector<std::vector<double>> rows, std::vector<double> pi) {
        FiniteKernel k;
        k.layout_ = Layout::dense;
        k.rows_ = std::move(rows);
        k.pi = std::move(pi);
        const std::size_t m = k.rows_.size();
        if (k.pi.size() != m) throw std::invalid_argument("FiniteKernel: pi size mismatch");
        for (const auto& row : k.rows_) {
            if (row.size() != m) throw std::invalid_argument("FiniteKernel: ragged matrix");
            double s = 0.0;
            for (double v : row) s += v;
            if (std::fabs(s - 1.0) > 1e-12)
                throw std::invalid_argument("FiniteKernel: row sum differs from 1");
        }
        // pi K = pi, entrywise
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += k.pi[i] * k.rows_[i][j];
            if (std::fabs(s - k.pi[j]) > 1e-10)
                throw std::invalid_argument("FiniteKernel: pi is not stationary");
        }
        return k;
    }

    // Renewal kernel truncated to states 0..M-1; jump mass beyond M-1 is the
    // reported truncation leak.
    static FiniteKernel renewal(const RenewalLaw& law, std::size_t M) {
        if (M < 2) throw std::invalid_argument("FiniteKernel::renewal: M >= 2");
        FiniteKernel k;
        k.layout_ = Layout::renewal_shift;
        k.jump_row_.assign(M, 0.0);
        double mass = 0.0;
        for (std::size_t j = 1; j < M && j <= law.jump_pmf.size(); ++j) {
            k.jump_row_[j] = law.jump_pmf[j - 1];
            mass += law.jump_pmf[j - 1];
        }
        k.discretization_error = 1.0 - mass;
        k.pi.assign(M, 0.0);
        for (std::size_t s = 0; s < M && s < law.pi_pmf.size(); ++s) k.pi[s] = law.pi_pmf[s];
        return k;
    }

    // Harris kernel on M midpoint bins: diagonal hold (1-x_i) plus the
    // rank-one jump x_i nu(.). Only nu's density is binned; the diagonal atom
    // is exact bin by bin.
    static FiniteKernel harris(const HarrisParams& params, std::size_t M) {
        if (M < 2) throw std::invalid_argument("FiniteKernel::harris: M >= 2");
        FiniteKernel k;
        k.layout_ = Layout::harris_diag_rank1;
        k.hold_.resize(M);
        k.nu_bin_.resize(M);
        k.pi.resize(M);
        const double a = params.a;
        for (std::size_t i = 0; i < M; ++i) {
            const double lo = static_cast<double>(i) / static_cast<double>(M);
            const double hi = static_cast<double>(i + 1) / static_cast<double>(M);
            const double mid = 0.5 * (lo + hi);
            k.hold_[i] = 1.0 - mid;
            k.nu_bin_[i] = std::pow(hi, a + 1.0) - std::pow(lo, a + 1.0);
            k.pi[i] = std::pow(hi, a) - std::pow(lo, a);
        }
        return k;
    }

    std::size_t size() const {
        switch (layout_) {
            case Layout::dense: return rows_.size();
            case Layout::renewal_shift: return jump_row_.size();
            case Layout::harris_diag_rank1: return hold_.size();
        }
        return 0;
    }

    std::vector<double> apply(const std::vector<double>& f) const {
        if (f.size() != size()) throw std::invalid_argument("FiniteKernel::apply: size mismatch");
        std::vector<double> g(f.size());
        switch (layout_) {
            case Layout::dense:
                for (std::size_t s = 0; s < f.size(); ++s) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < f.size(); ++j) acc += rows_[s][j] * f[j];
                    g[s] = acc;
                }
                break;
            case Layout::renewal_shift: {
                double acc = 0.0;
                for (std::size_t j = 1; j < f.size(); ++j) acc += jump_row_[j] * f[j];
                g[0] = acc;
                for (std::size_t s = 1; s < f.size(); ++s) g[s] = f[s - 1];
                break;
            }
            case Layout::harris_diag_rank1: {
                double nu_f = 0.0;
                for (std::size_t j = 0; j < f.size(); ++j) nu_f += nu_bin_[j] * f[j];
                for (std::size_t i = 0; i < f.size(); ++i)
                    g[i] = hold_[i] * f[i] + (1.0 - hold_[i]) * nu_f;
                break;
            }
        }
        return g;
    }

private:
    Layout layout_ = Layout::dense;
    std::vector<std::vector<double>> rows_; // dense
    std::vector<double> jump_row_;          // renewal_shift
    std::vector<double> hold_, nu_bin_;     // harris_diag_rank1
};

inline std::vector<double> exact_iterate(const FiniteKernel& kernel, std::vector<double> f,
                                         std::int64_t n) {
    if (n < 0) throw std::domain_error("exact_iterate: requires n >= 0");
    for (std::int64_t i = 0; i < n; ++i) f = kernel.apply(f);
    return f;
}

// pi-weighted L1 distance sum_s pi(s) |g(s) - pi_f|.
inline double pi_l1_deviation(const FiniteKernel& kernel, const std::vector<double>& g,
                              double pi_f) {
    double acc = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) acc += kernel.pi[s] * std::fabs(g[s] - pi_f);
    return acc;
}

// ---------------------------------------------------------------------------
// Doubling chain closed forms. K maps affine functions to affine functions:
// a x + b -> (a/2) x + (b + a/4), so iterates and the mixing coefficient are
// exact. For general f the 2^{-n} sum over dyadic translates is available at
// small n as an independent route.
// ---------------------------------------------------------------------------
struct AffineFn {
    double a = 0.0;
    double b = 0.0;
};

inline AffineFn doubling_iterate_affine(AffineFn f, std::int64_t n) {
    if (n < 0) throw std::domain_error("doubling_iterate_affine: requires n >= 0");
    for (std::int64_t i = 0; i < n; ++i) f = {0.5 * f.a, f.b + 0.25 * f.a};
    return f;
}

inline double doubling_iterate_value(const std::function<double(double)>& f, std::int64_t n,
                                     double x) {
    if (n < 0 || n > 26) throw std::domain_error("doubling_iterate_value: n outside [0,26]");
    const std::int64_t m = std::int64_t{1} << n;
    double acc = 0.0;
    const double scale = 1.0 / static_cast<double>(m);
    for (std::int64_t j = 0; j < m; ++j)
        acc += f((x + static_cast<double>(j)) * scale);
    return acc * scale;
}

// int_0^1 |K^n f - pi f| dx for affine f: the iterate is a_n x + b_n and
// pi f = a_n/2 + b_n, so the integral is |a_n|/4.
inline double doubling_h1_affine(AffineFn f, std::int64_t n) {
    AffineFn g = doubling_iterate_affine(f, n);
    return std::fabs(g.a) * 0.25;
}

// ---------------------------------------------------------------------------
// Renewal chain: exact values of (K^m f0)(0) for the centered indicator
// f0 = pi{0} - 1_{n=0}. Descent is deterministic, so K^m f0(s) = a_{m-s} for
// s <= m and pi{0} otherwise, giving a one-dimensional recursion
//   a_m = sum_{j=1}^{m-1} q_j a_{m-1-j} + pi0 Q_{>=m},
// with Q_{>=m} the jump tail mass (analytic beyond the truncation).
// ---------------------------------------------------------------------------
inline std::vector<double> renewal_indicator_iterates(const RenewalLaw& law, std::int64_t m_max) {
    if (m_max < 0) throw std::domain_error("renewal_indicator_iterates: m_max >= 0");
    std::vector<double> a(static_cast<std::size_t>(m_max) + 1);
    std::vector<double> Q(static_cast<std::size_t>(m_max) + 1); // Q[m] = sum_{j>=m} q_j
    for (std::int64_t m = 0; m <= m_max; ++m)
        Q[static_cast<std::size_t>(m)] =
            power_tail_sum(law.p + 1.0, static_cast<std::uint64_t>(std::max<std::int64_t>(m, 1))) /
            law.zeta_p1;
    a[0] = law.pi0 - 1.0;
    for (std::int64_t m = 1; m <= m_max; ++m) {
        double acc = law.pi0 * Q[static_cast<std::size_t>(m)];
        for (std::int64_t j = 1; j <= m - 1; ++j) {
            const double qj = j <= static_cast<std::int64_t>(law.jump_pmf.size())
                                  ? law.jump_pmf[static_cast<std::size_t>(j - 1)]
                                  : 1.0 / (law.zeta_p1 * std::pow(static_cast<double>(j), law.p + 1.0));
            acc += qj * a[static_cast<std::size_t>(m - 1 - j)];
        }
        a[static_cast<std::size_t>(m)] = acc;
    }
    return a;
}

struct MixingEntry {
    std::int64_t n = 0;
    double coeff = 0.0;
    double stderr_coeff = 0.0;
    std::string method = "exact";
};

struct MixingCurve {
    std::vector<MixingEntry> entries;
    double discretization_error = 0.0;
};

// Exact pi(|K^n f0 - pi f0|) for the renewal indicator, n = 1..n_max.
inline MixingCurve renewal_h1_curve(const RenewalLaw& law, std::int64_t n_max) {
    if (n_max < 1) throw std::domain_error("renewal_h1_curve: n_max >= 1");
    std::vector<double> a = renewal_indicator_iterates(law, n_max);

    // pi(s) for s <= n_max, plus the aggregated mass above each n
    std::vector<double> pi_s(static_cast<std::size_t>(n_max) + 1);
    for (std::int64_t s = 1; s <= n_max; ++s)
        pi_s[static_cast<std::size_t>(s)] =
            law.d * power_tail_sum(law.p + 1.0, static_cast<std::uint64_t>(s));
    pi_s[0] = law.d * law.zeta_p1;

    MixingCurve curve;
    curve.entries.reserve(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 1; n <= n_max; ++n) {
        double acc = 0.0;
        for (std::int64_t s = 0; s <= n; ++s)
            acc += pi_s[static_cast<std::size_t>(s)] *
                   std::fabs(a[static_cast<std::size_t>(n - s)]);
        // sum_{s>n} pi(s) = d [ sum_{i>n} i^{-p} - n sum_{i>n} i^{-(p+1)} ]
        double mass_above =
            law.d * (power_tail_sum(law.p, static_cast<std::uint64_t>(n) + 1) -
                     static_cast<double>(n) *
                         power_tail_sum(law.p + 1.0, static_cast<std::uint64_t>(n) + 1));
        acc += law.pi0 * mass_above;
        curve.entries.push_back({n, acc, 0.0, "exact"});
    }
    return curve;
}

// Discretized-kernel curve for the Harris chain; discretization error is the
// Richardson comparison against M/2 bins at the largest requested n.
inline MixingCurve harris_h1_curve(const HarrisParams& params, const std::vector<std::int64_t>& ns,
                                   std::size_t M = 4096) {
    if (ns.empty()) throw std::invalid_argument("harris_h1_curve: empty n list");
    Observable obs = harris_power_observable(params);
    auto curve_for = [&](std::size_t bins) {
        FiniteKernel k = FiniteKernel::harris(params, bins);
        std::vector<double> f(bins);
        for (std::size_t i = 0; i < bins; ++i) {
            double mid = (static_cast<double>(i) + 0.5) / static_cast<double>(bins);
            f[i] = observable_value(obs, mid);
        }
        MixingCurve c;
        std::vector<double> g = f;
        std::int64_t done = 0;
        for (std::int64_t n : ns) {
            if (n < done) throw std::invalid_argument("harris_h1_curve: ns must be ascending");
            for (; done < n; ++done) g = k.apply(g);
            c.entries.push_back({n, pi_l1_deviation(k, g, 0.0), 0.0, "exact"});
        }
        return c;
    };
    MixingCurve fine = curve_for(M);
    MixingCurve coarse = curve_for(M / 2);
    fine.discretization_error =
        std::fabs(fine.entries.back().coeff - coarse.entries.back().coeff);
    return fine;
}

// Monte-Carlo mixing coefficient: outer stationary starts, inner trajectories
// estimating E(f(Y_n) | Y_0 = s); stderr is the outer-sample standard error.
inline MixingEntry h1_coefficient_mc(const ChainModel& chain, const Observable& obs,
                                     std::int64_t n, std::int64_t outer, std::int64_t inner,
                                     std::uint64_t seed) {
    if (n < 1) throw std::domain_error("h1_coefficient_mc: requires n >= 1");
    if (outer * inner < 100)
        throw std::invalid_argument("h1_coefficient_mc: fewer than 100 trajectories");
    double acc = 0.0, acc2 = 0.0;
    for (std::int64_t o = 0; o < outer; ++o) {
        RngStream rng(seed, static_cast<std::uint64_t>(o));
        const double start = stationary_sample(chain, rng);
        double mean = 0.0;
        for (std::int64_t i = 0; i < inner; ++i) {
            double s = start;
            for (std::int64_t k = 0; k < n; ++k) s = chain_step(chain, s, rng);
            mean += observable_value(obs, s);
        }
        mean /= static_cast<double>(inner);
        acc += std::fabs(mean);
        acc2 += mean * mean;
    }
    const double od = static_cast<double>(outer);
    MixingEntry e;
    e.n = n;
    e.coeff = acc / od;
    e.stderr_coeff = std::sqrt(std::max(0.0, acc2 / od - (acc / od) * (acc / od)) / od);
    e.method = "mc";
    return e;
}

// Single-n mixing coefficient, exact where a closed route exists.
inline MixingEntry h1_coefficient(const ChainModel& chain, const Observable& obs,
                                  std::int64_t n) {
    if (n < 1) throw std::domain_error("h1_coefficient: requires n >= 1");
    if (auto* r = std::get_if<RenewalChain>(&chain)) {
        if (obs.kind != ObservableKind::renewal_indicator)
            throw UnsupportedOperation("h1_coefficient: exact renewal route needs the indicator");
        MixingCurve c = renewal_h1_curve(r->law, n);
        return c.entries.back();
    }
    if (std::holds_alternative<DoublingChain>(chain)) {
        if (obs.kind != ObservableKind::identity)
            throw UnsupportedOperation("h1_coefficient: exact doubling route needs an affine f");
        return {n, doubling_h1_affine({1.0, -obs.centering}, n), 0.0, "exact"};
    }
    if (auto* h = std::get_if<HarrisChain>(&chain)) {
        MixingCurve c = harris_h1_curve(h->params, {n});
        MixingEntry e = c.entries.back();
        e.stderr_coeff = c.discretization_error;
        return e;
    }
    throw UnsupportedOperation("h1_coefficient: no exact route for this chain");
}

// ---------------------------------------------------------------------------
// Polynomial-decay fit of a mixing curve on [n_min, n_max].
// ---------------------------------------------------------------------------
struct RateFitResult {
    ScalingFit fit;
    std::string flag;                  // e.g. "faster_than_polynomial"
    std::vector<std::int64_t> excluded; // entries dropped (coeff = 0)
};

// Unweighted least squares on log-log points by default; stderr weighting is
// available for mixed exact/MC curves (weights 1/sigma_log^2, exact entries
// pinned at a large finite weight).
inline RateFitResult rate_fit(const MixingCurve& curve, std::int64_t n_min, std::int64_t n_max,
                              bool weight_by_stderr = false) {
    std::vector<double> lx, ly, w;
    RateFitResult out;
    for (const auto& e : curve.entries) {
        if (e.n < n_min || e.n > n_max) continue;
        if (e.coeff <= 0.0) {
            out.excluded.push_back(e.n);
            continue;
        }
        lx.push_back(std::log(static_cast<double>(e.n)));
        ly.push_back(std::log(e.coeff));
        double sigma_log = e.stderr_coeff / e.coeff;
        w.push_back(1.0 / (sigma_log * sigma_log + 1e-12));
    }
    if (lx.size() < 5)
        throw std::invalid_argument("rate_fit: need >= 5 positive entries in range");
    LinearFit lf = weight_by_stderr ? weighted_least_squares(lx, ly, w)
                                    : least_squares(lx, ly);
    out.fit.slope = lf.slope;
    out.fit.intercept = lf.intercept;
    out.fit.stderr_slope = lf.slope_stderr;
    out.fit.points_used = lf.points;

    // superpolynomial decay shows as strongly decreasing local slope
    const std::size_t half = lx.size() / 2;
    if (half >= 2 && lx.size() - half >= 2) {
        LinearFit lo = least_squares({lx.begin(), lx.begin() + half},
                                     {ly.begin(), ly.begin() + half});
        LinearFit hi = least_squares({lx.begin() + half, lx.end()},
                                     {ly.begin() + half, ly.end()});
        if (hi.slope < lo.slope - 0.75) out.flag = "faster_than_polynomial";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature facts used by the Harris analysis:
// int_0^1 (1-x)^k x^b dx = B(b+1, k+1) <= k^{-(b+1)} Gamma(b+1), and the
// beta-mixing envelope E_pi(T^k) = a B(a, k+1) with T(x) = 1-x.
// ---------------------------------------------------------------------------
inline double one_minus_x_pow_moment(double b, double k) {
    return beta_fn(b + 1.0, k + 1.0);
}

inline double quadrature_majorant(double b, double k) {
    return std::pow(k, -(b + 1.0)) * std::tgamma(b + 1.0);
}

inline double harris_beta_envelope(const HarrisParams& params, std::int64_t n) {
    // 2 beta_n <= 6 E_pi(T^{[n/2]})
    const double k = static_cast<double>(n / 2);
    return 6.0 * params.a * beta_fn(params.a, k + 1.0);
}

} // namespace polymix
