#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polymix {

// An evaluated inequality right-hand side, split into labeled additive terms.
// Labels are a stable public contract; reports reference terms by name.
struct BoundTerm {
    std::string label;
    double value = 0.0;
};

struct BoundBreakdown {
    std::string op;
    std::vector<BoundTerm> terms;
    double total = 0.0;
    std::string regime; // empty unless a trivial regime or a flag applies

    void finish() {
        total = 0.0;
        for (const auto& t : terms) {
            if (!std::isfinite(t.value) || t.value < 0.0)
                throw std::domain_error("BoundBreakdown: term '" + t.label +
                                        "' is not finite and nonnegative");
            total += t.value;
        }
    }
};

enum class ModDevCase { p_gt_2, p_eq_2, p_lt_2 };

inline const char* moddev_case_name(ModDevCase c) {
    switch (c) {
        case ModDevCase::p_gt_2: return "p_gt_2";
        case ModDevCase::p_eq_2: return "p_eq_2";
        case ModDevCase::p_lt_2: return "p_lt_2";
    }
    return "?";
}

// Moderate-deviation upper bound for max_k |S_k| of a polynomially mixing
// chain. p>2: kappa n x^-p + kappa exp(-x^2/(kappa n)); p=2 adds the
// (n log n)^{r/2} x^-r term with r in (2,4); 1<p<2: kappa n x^-p alone.
inline BoundBreakdown moddev_bound(ModDevCase c, std::int64_t n, double x, double p,
                                   double r, double kappa) {
    if (!(x > 0.0)) throw std::domain_error("moddev_bound: requires x > 0");
    if (n < 1) throw std::domain_error("moddev_bound: requires n >= 1");
    switch (c) {
        case ModDevCase::p_gt_2:
            if (!(p > 2.0)) throw std::domain_error("moddev_bound: case p_gt_2 needs p > 2");
            break;
        case ModDevCase::p_eq_2:
            if (p != 2.0) throw std::domain_error("moddev_bound: case p_eq_2 needs p = 2");
            if (!(r > 2.0 && r < 4.0))
                throw std::domain_error("moddev_bound: case p_eq_2 needs r in (2,4)");
            break;
        case ModDevCase::p_lt_2:
            if (!(p > 1.0 && p < 2.0))
                throw std::domain_error("moddev_bound: case p_lt_2 needs 1 < p < 2");
            break;
    }
    const double nd = static_cast<double>(n);
    BoundBreakdown b;
    b.op = "moddev";
    switch (c) {
        case ModDevCase::p_gt_2:
            b.terms.push_back({"poly_tail", kappa * nd * std::pow(x, -p)});
            b.terms.push_back({"exp_gaussian",
                               kappa == 0.0 ? 0.0 : kappa * std::exp(-x * x / (kappa * nd))});
            break;
        case ModDevCase::p_eq_2:
            b.terms.push_back({"poly_tail", kappa * nd / (x * x)});
            b.terms.push_back({"anomalous_clt",
                               kappa * std::pow(nd * std::log(nd), r / 2.0) * std::pow(x, -r)});
            break;
        case ModDevCase::p_lt_2:
            b.terms.push_back({"poly_tail", kappa * nd * std::pow(x, -p)});
            break;
    }
    b.finish();
    return b;
}

// Rio's Fuk-Nagaev inequality for strong mixing chains:
// C { n/x^p + n^{r/2}/x^r + (n log n)^{r/2}/x^r 1_{p=2} }.
inline BoundBreakdown rio_fn_bound(std::int64_t n, double x, double p, double r, double C) {
    if (!(x > 0.0)) throw std::domain_error("rio_fn_bound: requires x > 0");
    if (!(p >= 2.0)) throw std::domain_error("rio_fn_bound: requires p >= 2");
    if (!(r >= 1.0)) throw std::domain_error("rio_fn_bound: requires r >= 1");
    const double nd = static_cast<double>(n);
    BoundBreakdown b;
    b.op = "rio_fn";
    b.terms.push_back({"poly_tail", C * nd * std::pow(x, -p)});
    b.terms.push_back({"rosenthal_variance", C * std::pow(nd, r / 2.0) * std::pow(x, -r)});
    if (p == 2.0)
        b.terms.push_back({"log_correction",
                           C * std::pow(nd * std::log(nd), r / 2.0) * std::pow(x, -r)});
    b.finish();
    return b;
}

// Constants of Fuk's martingale inequality: beta = p/(p+2) and
// c* = (1-beta)^2/(2 e^p); the reverse-martingale variant divides by 8 e^p.
struct FukConstants {
    double p = 0.0;
    double beta = 0.0;
    double c_star = 0.0;
    bool reverse = false;
};

inline FukConstants fuk_constants(double p, bool reverse) {
    if (!(p >= 2.0)) throw std::domain_error("fuk_constants: requires p >= 2");
    FukConstants f;
    f.p = p;
    f.beta = p / (p + 2.0);
    const double num = (1.0 - f.beta) * (1.0 - f.beta);
    f.c_star = reverse ? num / (8.0 * std::exp(p)) : num / (2.0 * std::exp(p));
    f.reverse = reverse;
    return f;
}

// Fuk inequality for (reverse) martingale differences. The caller supplies
//   sum_tail_probs = sum_i P(|d_i| >= beta x),
//   sum_weak_caps  = sum_i ||E(|d_i|^p 1_{|d_i|<=beta x} | F)||_inf,
//   sum_var_caps   = sum_i ||E(d_i^2 | F)||_inf.
// Forward: tail + 2/(beta^p x^p) weak + 2 exp(-c* x^2 / var).
// Reverse: tail + 2^{p+1}/(beta^p x^p) weak + 4 exp(-c~* x^2 / var).
inline BoundBreakdown fuk_bound(double p, double x, double sum_tail_probs,
                                double sum_weak_caps, double sum_var_caps, bool reverse) {
    if (!(x > 0.0)) throw std::domain_error("fuk_bound: requires x > 0");
    if (sum_tail_probs < 0 || sum_weak_caps < 0 || sum_var_caps < 0)
        throw std::domain_error("fuk_bound: sums must be nonnegative");
    FukConstants fc = fuk_constants(p, reverse);
    const double poly_coeff = reverse ? std::pow(2.0, p + 1.0) : 2.0;
    const double exp_coeff = reverse ? 4.0 : 2.0;

    BoundBreakdown b;
    b.op = reverse ? "fuk_reverse" : "fuk";
    b.terms.push_back({"excess_prob", sum_tail_probs});
    b.terms.push_back(
        {"truncated_moment", poly_coeff / std::pow(fc.beta * x, p) * sum_weak_caps});
    double expo;
    if (sum_var_caps == 0.0) {
        expo = 0.0; // limit of exp(-c x^2 / v) as v -> 0+
        b.regime = "var_cap_zero: exponential term taken as its limit 0";
    } else {
        expo = exp_coeff * std::exp(-fc.c_star * x * x / sum_var_caps);
    }
    b.terms.push_back({"exp_variance", expo});
    b.finish();
    return b;
}

// Fuk bound under a conditional weak moment of order p:
// C_p/x^p sum M_i^p + 4 exp(-x^2/(C_p sum_var_caps)).
inline BoundBreakdown weak_fuk_bound(double p, double x, const std::vector<double>& M_list,
                                     double var_cap_sum, double C_p) {
    if (!(x > 0.0)) throw std::domain_error("weak_fuk_bound: requires x > 0");
    if (!(C_p > 0.0)) throw std::domain_error("weak_fuk_bound: requires C_p > 0");
    if (!(p >= 2.0)) throw std::domain_error("weak_fuk_bound: requires p >= 2");
    double weak = 0.0;
    for (double m : M_list) {
        if (m < 0.0) throw std::domain_error("weak_fuk_bound: M_i must be nonnegative");
        weak += std::pow(m, p);
    }
    BoundBreakdown b;
    b.op = "weak_fuk";
    b.terms.push_back({"weak_moment", C_p / std::pow(x, p) * weak});
    double expo = 0.0;
    if (var_cap_sum > 0.0)
        expo = 4.0 * std::exp(-x * x / (C_p * var_cap_sum));
    else
        b.regime = "var_cap_zero: exponential term taken as its limit 0";
    b.terms.push_back({"exp_variance", expo});
    b.finish();
    return b;
}

// Default C_p for weak_fuk_bound, traced through the proof with q = p+1:
// the excess-probability term needs beta_q^{-p}, the truncated-moment term
// 2^{q+1} beta_q^{-q} * q beta_q^{q-p}/(q-p). Documented arithmetic, not tight.
inline double weak_fuk_default_Cp(double p) {
    if (!(p >= 2.0)) throw std::domain_error("weak_fuk_default_Cp: requires p >= 2");
    const double q = p + 1.0;
    const double beta_q = q / (q + 2.0);
    const double first = std::pow(beta_q, -p);
    const double second =
        std::pow(2.0, q + 1.0) * std::pow(beta_q, -q) * q * std::pow(beta_q, q - p) / (q - p);
    return std::max(first, second);
}

// Rosenthal-type deviation bound for stationary adapted sequences, r > 2:
//   N/x ||E(Z_2|G_0)||_1 + N/x^r E|Z_1|^r + N^{r/2}/x^r (E Z_1^2)^{r/2}
//   + N/x^r [sum_k k^{-1-2delta/r} (sum_i ||E(Z_i^2|G_0)-E Z_i^2||_{r/2})^delta]^{r/(2delta)}
// with delta = min(1, 1/(r-2)). `delta_sum` is the bracketed factor already
// raised to r/(2delta); pass delta_sum_raw=true to have it raised here.
inline BoundBreakdown rosenthal_bound(double r, std::int64_t N, double x, double l1_coupling,
                                      double r_moment, double second_moment, double delta_sum,
                                      double multiplier = 1.0, bool delta_sum_raw = false) {
    if (!(r > 2.0)) throw std::domain_error("rosenthal_bound: requires r > 2");
    if (!(x > 0.0)) throw std::domain_error("rosenthal_bound: requires x > 0");
    if (l1_coupling < 0 || r_moment < 0 || second_moment < 0 || delta_sum < 0)
        throw std::domain_error("rosenthal_bound: moment inputs must be nonnegative");
    const double delta = std::min(1.0, 1.0 / (r - 2.0));
    const double nd = static_cast<double>(N);
    double bracket = delta_sum_raw ? std::pow(delta_sum, r / (2.0 * delta)) : delta_sum;

    BoundBreakdown b;
    b.op = "rosenthal";
    if (delta_sum_raw) b.regime = "delta_sum supplied raw; raised to r/(2 delta)";
    b.terms.push_back({"coupling_l1", multiplier * nd / x * l1_coupling});
    b.terms.push_back({"r_moment", multiplier * nd * std::pow(x, -r) * r_moment});
    b.terms.push_back({"variance_r2",
                       multiplier * std::pow(nd, r / 2.0) * std::pow(x, -r) *
                           std::pow(second_moment, r / 2.0)});
    b.terms.push_back({"delta_correction", multiplier * nd * std::pow(x, -r) * bracket});
    b.finish();
    return b;
}

inline double rosenthal_delta(double r) {
    if (!(r > 2.0)) throw std::domain_error("rosenthal_delta: requires r > 2");
    return std::min(1.0, 1.0 / (r - 2.0));
}

// Concentration bound for separately Lipschitz functionals on Young towers.
// p>2: kappa sum L^p / x^p + kappa exp(-x^2/(kappa sum L^2));
// p=2: same polynomial term with the exponential denominator multiplied by
//      (1 + log sum L - log sqrt(sum L^2));  p<2: polynomial term alone.
inline BoundBreakdown young_bound(double p, const std::vector<double>& L_list, double x,
                                  double kappa) {
    if (!(p > 1.0)) throw std::domain_error("young_bound: requires p > 1");
    if (!(x > 0.0)) throw std::domain_error("young_bound: requires x > 0");
    double sum_Lp = 0.0, sum_L2 = 0.0, sum_L = 0.0;
    for (double L : L_list) {
        if (L < 0.0) throw std::domain_error("young_bound: L_i must be nonnegative");
        sum_Lp += std::pow(L, p);
        sum_L2 += L * L;
        sum_L += L;
    }
    BoundBreakdown b;
    b.op = "young";
    b.terms.push_back({"poly_tail", kappa * sum_Lp / std::pow(x, p)});
    if (p > 2.0) {
        double expo = (kappa == 0.0 || sum_L2 == 0.0)
                          ? 0.0
                          : kappa * std::exp(-x * x / (kappa * sum_L2));
        b.terms.push_back({"exp_gaussian", expo});
    } else if (p == 2.0) {
        if (!(sum_L > 0.0))
            throw std::domain_error("young_bound: p = 2 log branch needs sum L_i > 0");
        double log_factor = 1.0 + std::log(sum_L) - 0.5 * std::log(sum_L2);
        if (!(log_factor > 0.0))
            throw std::domain_error("young_bound: nonpositive log factor"); // unreachable for valid L
        double denom = sum_L2 * log_factor;
        double expo = kappa == 0.0 ? 0.0 : kappa * std::exp(-x * x / (kappa * denom));
        b.terms.push_back({"exp_gaussian_log", expo});
    }
    b.finish();
    return b;
}

// The p = 2 exponential denominator of young_bound, exposed for reporting.
inline double young_p2_log_denominator(const std::vector<double>& L_list) {
    double sum_L2 = 0.0, sum_L = 0.0;
    for (double L : L_list) {
        sum_L2 += L * L;
        sum_L += L;
    }
    if (!(sum_L > 0.0)) throw std::domain_error("young_p2_log_denominator: needs sum L_i > 0");
    return sum_L2 * (1.0 + std::log(sum_L) - 0.5 * std::log(sum_L2));
}

// Conditional weak-moment majorant M_k^p = C sum_{j<=k} L_j^p c0_{k-j}
// + C sup_h (h^{-1} sum_{j=k-h+1}^k L_j)^p, the sup over h = 1..k+1 (windows
// never extend below index 0).
inline double maximal_Mk(const std::vector<double>& L_list, const std::vector<double>& c0_list,
                         double C, std::size_t k, double p) {
    if (k >= L_list.size()) throw std::out_of_range("maximal_Mk: k outside L_list");
    double conv = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
        double c0 = (k - j) < c0_list.size() ? c0_list[k - j] : 0.0;
        if (c0 < 0.0) throw std::domain_error("maximal_Mk: c0 must be nonnegative");
        conv += std::pow(L_list[j], p) * c0;
    }
    double sup = 0.0;
    double window = 0.0;
    for (std::size_t h = 1; h <= k + 1; ++h) {
        window += L_list[k + 1 - h];
        sup = std::max(sup, window / static_cast<double>(h));
    }
    return C * conv + C * std::pow(sup, p);
}

// Default summable sequence c0_k = (k+1)^{-2} of the stated length.
inline std::vector<double> default_c0(std::size_t len) {
    std::vector<double> c0(len);
    for (std::size_t k = 0; k < len; ++k)
        c0[k] = 1.0 / (static_cast<double>(k + 1) * static_cast<double>(k + 1));
    return c0;
}

// ---------------------------------------------------------------------------
// Block machinery: t = [n^{1/p}] is the block length, u = [x/(2 ||f|| n^{1/p})]
// the number of blocks grouped to the x scale, n_t = [n/t], n_u = [[n_t/2]/u].
// Outside 2||f|| n^{1/p} <= x <= ||f|| n / 4 the target probability is either
// trivially bounded or identically zero, flagged rather than raised.
// ---------------------------------------------------------------------------
struct BlockParams {
    std::int64_t n = 0;
    double x = 0.0;
    double p = 0.0;
    double f_inf = 0.0;
    std::int64_t t = 0;
    std::int64_t u = 0;
    std::int64_t n_t = 0;
    std::int64_t n_u = 0;
    double y = 0.0;
    bool trivial_low = false;  // x <= 2 ||f|| n^{1/p}
    bool trivial_high = false; // x > ||f|| n / 4
};

// floor(n^{1/p}) with integer verification against rounding of pow.
inline std::int64_t integer_root_floor(std::int64_t n, double p) {
    auto leq_n = [&](std::int64_t t) {
        if (t <= 1) return t >= 0;
        return p * std::log(static_cast<double>(t)) <=
               std::log(static_cast<double>(n)) * (1.0 + 1e-14) + 1e-12;
    };
    auto t = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / p)));
    while (!leq_n(t)) --t;
    while (leq_n(t + 1)) ++t;
    return t;
}

inline BlockParams block_parameters(std::int64_t n, double x, double p, double f_inf,
                                    double kappa = 1.0) {
    if (n < 1) throw std::domain_error("block_parameters: requires n >= 1");
    if (!(x > 0.0)) throw std::domain_error("block_parameters: requires x > 0");
    if (!(f_inf > 0.0)) throw std::domain_error("block_parameters: requires f_inf > 0");
    if (!(p >= 2.0)) throw std::domain_error("block_parameters: requires p >= 2");

    BlockParams bp;
    bp.n = n;
    bp.x = x;
    bp.p = p;
    bp.f_inf = f_inf;
    const double nd = static_cast<double>(n);
    const double n_inv_p = std::pow(nd, 1.0 / p);
    bp.trivial_low = x <= 2.0 * f_inf * n_inv_p;
    bp.trivial_high = x > f_inf * nd / 4.0;
    bp.t = integer_root_floor(n, p);
    bp.u = static_cast<std::int64_t>(std::floor(x / (2.0 * f_inf * n_inv_p)));
    bp.n_t = n / bp.t;
    bp.n_u = bp.u > 0 ? (bp.n_t / 2) / bp.u : 0;
    if (p == 2.0) {
        const double nlogn = nd * std::log(nd);
        bp.y = std::max(2.0 * kappa * nlogn, 16.0 * x * std::sqrt(nlogn) * f_inf);
    } else {
        bp.y = std::max(2.0 * kappa * nd, 16.0 * x * n_inv_p * f_inf);
    }
    if (!bp.trivial_low && !bp.trivial_high) {
        if (bp.u < 1 || bp.n_t < 4 * bp.u || 2.0 * f_inf * static_cast<double>(bp.t * bp.u) > x)
            throw std::logic_error("block_parameters: invariants violated outside trivial regimes");
    }
    return bp;
}

// The two explicit Freedman terms 2 exp(-9x^2/(16y)) + 2 exp(-9x/(16 ||f|| n^{1/p}));
// the quadratic-variation probability is the caller's.
inline BoundBreakdown freedman_terms(double x, double y, double f_inf, std::int64_t n, double p) {
    if (!(x > 0.0 && y > 0.0 && f_inf > 0.0))
        throw std::domain_error("freedman_terms: requires x, y, f_inf > 0");
    BoundBreakdown b;
    b.op = "freedman";
    b.terms.push_back({"exp_quadratic", 2.0 * std::exp(-9.0 * x * x / (16.0 * y))});
    b.terms.push_back(
        {"exp_linear",
         2.0 * std::exp(-9.0 * x / (16.0 * f_inf * std::pow(static_cast<double>(n), 1.0 / p)))});
    b.finish();
    return b;
}

// Explicit constant of the Harris lower bound:
// C_{p,gamma} = (1/4) (c_{a,gamma} eta / 48)^p p Gamma(p), eta = 1 - (c/2)^{1/gamma}.
inline double harris_lower_constant(double p, double gamma) {
    if (!(p > 1.0)) throw std::domain_error("harris_lower_constant: requires p > 1");
    if (!(gamma > 0.0)) throw std::domain_error("harris_lower_constant: requires gamma > 0");
    const double a = p - 1.0;
    const double c = a / (a + gamma);
    const double eta = 1.0 - std::pow(c / 2.0, 1.0 / gamma);
    return 0.25 * std::pow(c * eta / 48.0, p) * p * std::tgamma(p);
}

} // namespace polymix
