#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "polymix/rng.hpp"
#include "polymix/special.hpp"

namespace polymix {

struct UnsupportedOperation : std::runtime_error {
    explicit UnsupportedOperation(const std::string& msg) : std::runtime_error(msg) {}
};

// One (mark, length) regeneration pair: jump height for the renewal chain,
// Y_{T_k} for the Harris chain; length is the excursion length tau >= 1.
struct ExcursionSample {
    double mark = 0.0;
    std::int64_t length = 1;
};

// ---------------------------------------------------------------------------
// Renewal chain on {0,1,2,...}: from 0 jump to n with probability
// 1/(zeta(p+1) n^{p+1}), from n>0 step down to n-1. Stationary law
// pi{n} = sum_{i>=n} d/i^{p+1} for n>0, pi{0} = pi{1}, d = 1/(zeta(p)+zeta(p+1)).
// ---------------------------------------------------------------------------
struct RenewalLaw {
    double p = 0.0;
    std::int64_t truncation_N = 0;
    double zeta_p = 0.0;   // zeta(p)
    double zeta_p1 = 0.0;  // zeta(p+1)
    double d = 0.0;        // 1/(zeta(p)+zeta(p+1))
    double pi0 = 0.0;      // d * zeta(p+1)
    double mean_tau = 0.0; // 1 + zeta(p)/zeta(p+1), closed form
    double tail_tol = 0.0; // jump mass beyond truncation_N
    std::string truncation_warning; // empty when the requested mass tolerance holds

    std::vector<double> jump_pmf; // jump_pmf[n-1] = 1/(zeta(p+1) n^{p+1}), n=1..N
    std::vector<double> pi_pmf;   // pi_pmf[n], n=0..N (analytic tail folded in)

    // cumulative caches for inverse-CDF sampling; the u64 thresholds are the
    // normalized cdf scaled to 2^64, so the hot path compares raw generator
    // words against integers (quantization 2^-64, far below double noise)
    std::vector<double> jump_cdf;
    std::vector<double> pi_cdf;
    std::vector<std::uint64_t> jump_thresh;
    std::vector<std::uint64_t> pi_thresh;
    double jump_mass = 0.0;
    double pi_mass = 0.0;

    // sup norm of the centered indicator observable pi{0} - 1_{n=0}
    double indicator_sup() const { return std::max(pi0, 1.0 - pi0); }

    std::int64_t sample_jump(RngStream& rng) const {
        return inverse_cdf_u64(jump_thresh, rng.next_u64()) + 1;
    }

    std::int64_t sample_stationary(RngStream& rng) const {
        return inverse_cdf_u64(pi_thresh, rng.next_u64());
    }

    static std::int64_t inverse_cdf_u64(const std::vector<std::uint64_t>& thresh,
                                        std::uint64_t z) {
        // the first few states carry nearly all mass; walk before bisecting
        const std::uint64_t* t = thresh.data();
        if (z < t[0]) return 0;
        std::size_t lin = std::min<std::size_t>(thresh.size(), 16);
        for (std::size_t i = 1; i < lin; ++i)
            if (z < t[i]) return static_cast<std::int64_t>(i);
        auto it = std::upper_bound(thresh.begin() + lin, thresh.end(), z);
        if (it == thresh.end()) return static_cast<std::int64_t>(thresh.size()) - 1;
        return static_cast<std::int64_t>(it - thresh.begin());
    }

    static std::vector<std::uint64_t> scale_cdf(const std::vector<double>& cdf, double mass) {
        std::vector<std::uint64_t> t(cdf.size());
        const long double scale = 18446744073709551616.0L; // 2^64
        for (std::size_t i = 0; i < cdf.size(); ++i) {
            long double v = static_cast<long double>(cdf[i]) / mass * scale;
            t[i] = v >= scale ? ~std::uint64_t{0} : static_cast<std::uint64_t>(v);
        }
        if (!t.empty()) t.back() = ~std::uint64_t{0};
        return t;
    }
};

inline RenewalLaw renewal_law(double p, std::int64_t N, double mass_tol = 1e-6) {
    if (!(p > 1.0)) throw std::domain_error("renewal_law: requires p > 1");
    if (N < 2) throw std::domain_error("renewal_law: requires N >= 2");

    RenewalLaw law;
    law.p = p;
    law.truncation_N = N;
    law.zeta_p = zeta(p, 1e-14);
    law.zeta_p1 = zeta(p + 1.0, 1e-14);
    law.d = 1.0 / (law.zeta_p + law.zeta_p1);
    law.pi0 = law.d * law.zeta_p1;
    law.mean_tau = 1.0 + law.zeta_p / law.zeta_p1;
    law.tail_tol = power_tail_sum(p + 1.0, static_cast<std::uint64_t>(N) + 1) / law.zeta_p1;
    if (law.tail_tol > mass_tol)
        law.truncation_warning = "jump mass beyond N exceeds requested tolerance";

    const std::size_t n = static_cast<std::size_t>(N);
    law.jump_pmf.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        law.jump_pmf[j] = 1.0 / (law.zeta_p1 * std::pow(static_cast<double>(j + 1), p + 1.0));

    law.jump_cdf.resize(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        acc += law.jump_pmf[j];
        law.jump_cdf[j] = acc;
    }
    law.jump_mass = acc;

    // pi{n} = d * sum_{i>=n} i^{-(p+1)}; backward sum keeps full precision
    law.pi_pmf.resize(n + 1);
    double z_tail = power_tail_sum(p + 1.0, static_cast<std::uint64_t>(N) + 1);
    for (std::size_t s = n; s >= 1; --s) {
        z_tail += std::pow(static_cast<double>(s), -(p + 1.0));
        law.pi_pmf[s] = law.d * z_tail;
    }
    law.pi_pmf[0] = law.pi_pmf[1];

    law.pi_cdf.resize(n + 1);
    acc = 0.0;
    for (std::size_t s = 0; s <= n; ++s) {
        acc += law.pi_pmf[s];
        law.pi_cdf[s] = acc;
    }
    law.pi_mass = acc;

    law.jump_thresh = RenewalLaw::scale_cdf(law.jump_cdf, law.jump_mass);
    law.pi_thresh = RenewalLaw::scale_cdf(law.pi_cdf, law.pi_mass);
    return law;
}

inline std::int64_t renewal_step(const RenewalLaw& law, std::int64_t state, RngStream& rng) {
    if (state < 0) throw std::domain_error("renewal_step: state must be >= 0");
    if (state > 0) return state - 1;
    return law.sample_jump(rng);
}

inline ExcursionSample renewal_excursion(const RenewalLaw& law, RngStream& rng) {
    std::int64_t j = law.sample_jump(rng);
    return {static_cast<double>(j), j + 1};
}

// ---------------------------------------------------------------------------
// Harris chain on [0,1]: K(x,.) = (1-x) delta_x + x nu with nu = (1+a) x^a dx
// and stationary law pi = a x^{a-1} dx, a = p-1.
// ---------------------------------------------------------------------------
struct HarrisParams {
    double p = 0.0;
    double a = 0.0;
    double gamma = 0.0;
    double c_a_gamma = 0.0; // a/(a+gamma), the mean of Y^gamma under pi

    double nu_draw(RngStream& rng) const {
        return std::pow(rng.next_unit_open(), 1.0 / (a + 1.0));
    }
    double pi_draw(RngStream& rng) const {
        return std::pow(rng.next_unit_open(), 1.0 / a);
    }
    // mean excursion length E(tau) = p/(p-1)
    double mean_tau() const { return p / (p - 1.0); }
};

inline HarrisParams harris_params(double p, double gamma) {
    if (!(p > 1.0)) throw std::domain_error("harris_params: requires p > 1");
    if (!(gamma > 0.0)) throw std::domain_error("harris_params: requires gamma > 0");
    HarrisParams h;
    h.p = p;
    h.a = p - 1.0;
    h.gamma = gamma;
    h.c_a_gamma = h.a / (h.a + gamma);
    return h;
}

// x = 0 is a degenerate absorbing point; pi gives it mass 0 and nu never
// produces it, so it only occurs if the caller passes it in.
inline double harris_step(const HarrisParams& params, double x, RngStream& rng) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("harris_step: state outside [0,1]");
    if (rng.next_unit() < x) return params.nu_draw(rng);
    return x;
}

inline std::int64_t geometric_holding_time(double y, RngStream& rng) {
    // P(tau = k) = (1-y)^{k-1} y, mean 1/y
    double u = rng.next_unit_open();
    if (y >= 1.0) return 1;
    double t = std::floor(std::log(u) / std::log1p(-y));
    return 1 + static_cast<std::int64_t>(t);
}

inline ExcursionSample harris_excursion(const HarrisParams& params, RngStream& rng) {
    double y = params.nu_draw(rng);
    return {y, geometric_holding_time(y, rng)};
}

// ---------------------------------------------------------------------------
// Doubling map chain: K(f)(x) = (f(x/2) + f((x+1)/2))/2, invariant law
// Lebesgue on [0,1). Not strong mixing, but H(p) holds for every p in BV norm.
// ---------------------------------------------------------------------------
inline double doubling_step(double x, RngStream& rng) {
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("doubling_step: state outside [0,1)");
    return 0.5 * (x + (rng.next_bit() ? 1.0 : 0.0));
}

// ---------------------------------------------------------------------------
// Observables, centered so that the stationary mean vanishes.
// ---------------------------------------------------------------------------
enum class ObservableKind { renewal_indicator, harris_power, identity, custom_table };

struct Observable {
    ObservableKind kind = ObservableKind::identity;
    double centering = 0.0;
    double sup_norm = 0.0;
    double exponent = 1.0;            // harris_power only
    std::vector<double> table;        // custom_table only
};

inline Observable renewal_indicator_observable(const RenewalLaw& law) {
    Observable f;
    f.kind = ObservableKind::renewal_indicator;
    f.centering = law.pi0;
    f.sup_norm = law.indicator_sup();
    return f;
}

inline Observable harris_power_observable(const HarrisParams& params) {
    Observable f;
    f.kind = ObservableKind::harris_power;
    f.centering = params.c_a_gamma;
    f.sup_norm = std::max(params.c_a_gamma, 1.0 - params.c_a_gamma);
    f.exponent = params.gamma;
    return f;
}

inline Observable identity_observable(double mean) {
    Observable f;
    f.kind = ObservableKind::identity;
    f.centering = mean;
    f.sup_norm = std::numeric_limits<double>::quiet_NaN();
    return f;
}

inline Observable custom_table_observable(std::vector<double> values, double mean) {
    Observable f;
    f.kind = ObservableKind::custom_table;
    f.centering = mean;
    double s = 0.0;
    for (double v : values) s = std::max(s, std::fabs(v - mean));
    f.sup_norm = s;
    f.table = std::move(values);
    return f;
}

inline double observable_value(const Observable& obs, double state) {
    switch (obs.kind) {
        case ObservableKind::renewal_indicator:
            return obs.centering - (state == 0.0 ? 1.0 : 0.0);
        case ObservableKind::harris_power:
            return std::pow(state, obs.exponent) - obs.centering;
        case ObservableKind::identity:
            return state - obs.centering;
        case ObservableKind::custom_table: {
            auto idx = static_cast<std::int64_t>(std::llround(state));
            if (idx < 0 || static_cast<std::size_t>(idx) >= obs.table.size())
                throw std::out_of_range("observable_value: state outside custom table");
            return obs.table[static_cast<std::size_t>(idx)] - obs.centering;
        }
    }
    throw std::logic_error("observable_value: unknown kind");
}

// ---------------------------------------------------------------------------
// ChainModel: one of the built-in chains (tower is the independent-return
// product Young tower, identical in law to the renewal chain), or a custom
// finite transition table.
// ---------------------------------------------------------------------------
struct RenewalChain {
    RenewalLaw law;
    bool tower = false; // product-tower alias; same distribution, own label
};

struct HarrisChain {
    HarrisParams params;
};

struct DoublingChain {};

struct CustomChain {
    std::vector<std::vector<double>> rows; // row-stochastic transition table
    std::optional<std::vector<double>> pi; // stationary weights when known
};

using ChainModel = std::variant<RenewalChain, HarrisChain, DoublingChain, CustomChain>;

inline std::string chain_name(const ChainModel& chain) {
    if (auto* r = std::get_if<RenewalChain>(&chain)) return r->tower ? "tower" : "renewal";
    if (std::holds_alternative<HarrisChain>(chain)) return "harris";
    if (std::holds_alternative<DoublingChain>(chain)) return "doubling";
    return "custom";
}

inline double stationary_sample(const ChainModel& chain, RngStream& rng) {
    if (auto* r = std::get_if<RenewalChain>(&chain))
        return static_cast<double>(r->law.sample_stationary(rng));
    if (auto* h = std::get_if<HarrisChain>(&chain)) return h->params.pi_draw(rng);
    if (std::holds_alternative<DoublingChain>(chain)) return rng.next_unit();
    const auto& c = std::get<CustomChain>(chain);
    if (!c.pi) throw UnsupportedOperation("stationary_sample: custom chain has no stationary sampler");
    double u = rng.next_unit();
    double acc = 0.0;
    for (std::size_t i = 0; i < c.pi->size(); ++i) {
        acc += (*c.pi)[i];
        if (u < acc) return static_cast<double>(i);
    }
    return static_cast<double>(c.pi->size() - 1);
}

inline double chain_step(const ChainModel& chain, double state, RngStream& rng) {
    if (auto* r = std::get_if<RenewalChain>(&chain))
        return static_cast<double>(renewal_step(r->law, static_cast<std::int64_t>(state), rng));
    if (auto* h = std::get_if<HarrisChain>(&chain)) return harris_step(h->params, state, rng);
    if (std::holds_alternative<DoublingChain>(chain)) return doubling_step(state, rng);
    const auto& c = std::get<CustomChain>(chain);
    auto s = static_cast<std::size_t>(state);
    if (s >= c.rows.size()) throw std::out_of_range("chain_step: state outside table");
    double u = rng.next_unit();
    double acc = 0.0;
    for (std::size_t j = 0; j < c.rows[s].size(); ++j) {
        acc += c.rows[s][j];
        if (u < acc) return static_cast<double>(j);
    }
    return static_cast<double>(c.rows[s].size() - 1);
}

// Default centered observable for each built-in chain.
inline Observable default_observable(const ChainModel& chain) {
    if (auto* r = std::get_if<RenewalChain>(&chain)) return renewal_indicator_observable(r->law);
    if (auto* h = std::get_if<HarrisChain>(&chain)) return harris_power_observable(h->params);
    if (std::holds_alternative<DoublingChain>(chain)) return identity_observable(0.5);
    throw UnsupportedOperation("default_observable: custom chain needs an explicit observable");
}

} // namespace polymix
