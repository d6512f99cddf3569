#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymix/bounds.hpp"
#include "polymix/chains.hpp"
#include "polymix/mixing.hpp"
#include "polymix/parallel.hpp"
#include "polymix/rng.hpp"
#include "polymix/stats.hpp"

namespace polymix {

// Stream-index namespaces: trial i of the main run uses stream i; auxiliary
// samples (independent mean estimation, CLI pilot runs) use disjoint offsets.
inline constexpr std::uint64_t kMeanEstimationStreamBase = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kPilotStreamBase = std::uint64_t{1} << 41;

enum class TailStatistic { max_abs_partial_sum, abs_sum, excursion_sum, functional };

inline const char* tail_statistic_name(TailStatistic s) {
    switch (s) {
        case TailStatistic::max_abs_partial_sum: return "max_abs_partial_sum";
        case TailStatistic::abs_sum: return "abs_sum";
        case TailStatistic::excursion_sum: return "excursion_sum";
        case TailStatistic::functional: return "functional";
    }
    return "?";
}

// One (n, x) cell of an empirical deviation probability.
struct TailEstimate {
    std::int64_t n = 0;
    double x = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    TailStatistic statistic = TailStatistic::max_abs_partial_sum;
};

inline TailEstimate make_tail_estimate(std::int64_t n, double x, std::uint64_t hits,
                                       std::uint64_t trials, TailStatistic stat) {
    TailEstimate e;
    e.n = n;
    e.x = x;
    e.hits = hits;
    e.trials = trials;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    WilsonInterval w = wilson_interval(hits, trials);
    e.ci_low = w.low;
    e.ci_high = w.high;
    e.statistic = stat;
    return e;
}

// ---------------------------------------------------------------------------
// Path engines. Each returns the running extreme values of S_k = sum_{i<=k}
// f0(Y_i) evaluated exactly at every checkpoint in `ckpts` (ascending).
// The renewal and Harris paths move in monotone segments between regeneration
// times, so extremes are updated at segment endpoints only.
// ---------------------------------------------------------------------------
struct SnapStat {
    double max_abs = 0.0; // max_{k<=n_c} |S_k|
    double final_abs = 0.0; // |S_{n_c}|
};

namespace detail {

class SegmentTracker {
public:
    SegmentTracker(const std::vector<std::int64_t>& ckpts, SnapStat* out)
        : ckpts_(ckpts), out_(out) {
        next_ckpt_ = ckpts_.empty() ? 0 : ckpts_.front();
        last_ckpt_ = ckpts_.empty() ? 0 : ckpts_.back();
    }

    // advance L steps with per-step increment delta (monotone segment);
    // segment interiors stay between the endpoint values, so extremes are
    // endpoint-only except where a checkpoint splits the segment
    void advance(std::int64_t L, double delta) {
        if (k_ + L < next_ckpt_) { // common case: no checkpoint inside
            k_ += L;
            S_ += delta * static_cast<double>(L);
            update(S_);
            return;
        }
        while (next_ < ckpts_.size() && k_ + L >= ckpts_[next_]) {
            const std::int64_t lambda = ckpts_[next_] - k_;
            record(S_ + delta * static_cast<double>(lambda));
            ++next_;
        }
        next_ckpt_ = next_ < ckpts_.size() ? ckpts_[next_]
                                           : std::numeric_limits<std::int64_t>::max();
        k_ += L;
        S_ += delta * static_cast<double>(L);
        update(S_);
    }

    bool done() const { return next_ >= ckpts_.size(); }
    std::int64_t position() const { return k_; }
    std::int64_t remaining() const { return last_ckpt_ - k_; }

private:
    void update(double s) {
        max_s_ = std::max(max_s_, s);
        min_s_ = std::min(min_s_, s);
    }
    void record(double s_at) {
        const double mx = std::max(max_s_, s_at);
        const double mn = std::min(min_s_, s_at);
        out_[next_].max_abs = std::max(mx, -mn);
        out_[next_].final_abs = std::fabs(s_at);
    }

    const std::vector<std::int64_t>& ckpts_;
    SnapStat* out_;
    std::int64_t k_ = 0;
    std::int64_t next_ckpt_ = 0;
    std::int64_t last_ckpt_ = 0;
    double S_ = 0.0;
    double max_s_ = -std::numeric_limits<double>::infinity();
    double min_s_ = std::numeric_limits<double>::infinity();
    std::size_t next_ = 0;
};

// Renewal chain, centered indicator f0 = pi0 - 1_{y=0}: descents add pi0 per
// step, each visit to 0 drops by 1 - pi0. With k steps consumed and m visits
// to 0 so far, S_k = pi0 k - m exactly; tracking (k, m) as integers keeps the
// inner loop free of a serial floating-point accumulation chain.
inline void renewal_snapshots(const RenewalLaw& law, const std::vector<std::int64_t>& ckpts,
                              RngStream& rng, SnapStat* out) {
    const double pi0 = law.pi0;
    const std::int64_t last = ckpts.back();
    std::size_t ci = 0;
    std::int64_t next_ck = ckpts.front();
    std::int64_t k = 0; // steps consumed
    std::int64_t m = 0; // zero visits
    double max_s = -std::numeric_limits<double>::infinity();
    double min_s = std::numeric_limits<double>::infinity();

    auto s_at = [&](std::int64_t kk, std::int64_t mm) {
        return pi0 * static_cast<double>(kk) - static_cast<double>(mm);
    };
    auto record = [&](double s_ck) { // running extremes already include s_ck
        out[ci].max_abs = std::max(max_s, -min_s);
        out[ci].final_abs = std::fabs(s_ck);
        ++ci;
        next_ck = ci < ckpts.size() ? ckpts[ci] : std::numeric_limits<std::int64_t>::max();
    };

    // initial stationary state: a deterministic descent of s0 steps
    std::int64_t s0 = law.sample_stationary(rng);
    if (s0 > 0) {
        std::int64_t L = std::min(s0, last - k);
        while (next_ck <= k + L) { // ascending segment: max is at the checkpoint
            double s_ck = s_at(next_ck, m);
            max_s = std::max(max_s, s_ck);
            record(s_ck);
        }
        k += L;
        max_s = std::max(max_s, s_at(k, m));
        if (ci >= ckpts.size()) return;
    }
    for (;;) {
        // one visit to 0
        k += 1;
        m += 1;
        double s_z = s_at(k, m);
        min_s = std::min(min_s, s_z);
        if (k == next_ck) {
            record(s_z);
            if (ci >= ckpts.size()) return;
        }
        // jump to J, then descend through positive states
        std::int64_t j = law.sample_jump(rng);
        std::int64_t L = std::min(j, last - k);
        if (k + L >= next_ck) {
            while (next_ck <= k + L) {
                double s_ck = s_at(next_ck, m);
                max_s = std::max(max_s, s_ck);
                record(s_ck);
            }
            if (ci >= ckpts.size()) return;
        }
        k += L;
        max_s = std::max(max_s, s_at(k, m));
    }
}

// Harris chain, f0 = y^gamma - c: constant increments during holds.
inline void harris_snapshots(const HarrisParams& params, const std::vector<std::int64_t>& ckpts,
                             RngStream& rng, SnapStat* out) {
    SegmentTracker tr(ckpts, out);
    double y = params.pi_draw(rng);
    while (!tr.done()) {
        const double delta = std::pow(y, params.gamma) - params.c_a_gamma;
        std::int64_t hold = geometric_holding_time(y, rng);
        tr.advance(std::min(hold, tr.remaining()), delta);
        if (tr.done()) break;
        y = params.nu_draw(rng);
    }
}

// Generic stepwise path for the doubling map, custom chains and reference
// checks; one step per increment.
inline void generic_snapshots(const ChainModel& chain, const Observable& obs,
                              const std::vector<std::int64_t>& ckpts, RngStream& rng,
                              SnapStat* out) {
    SegmentTracker tr(ckpts, out);
    double state = stationary_sample(chain, rng);
    while (!tr.done()) {
        tr.advance(1, observable_value(obs, state));
        if (tr.done()) break;
        state = chain_step(chain, state, rng);
    }
}

inline void path_snapshots(const ChainModel& chain, const Observable& obs,
                           const std::vector<std::int64_t>& ckpts, RngStream& rng,
                           SnapStat* out, bool force_generic = false) {
    if (!force_generic) {
        if (auto* r = std::get_if<RenewalChain>(&chain)) {
            if (obs.kind == ObservableKind::renewal_indicator) {
                renewal_snapshots(r->law, ckpts, rng, out);
                return;
            }
        } else if (auto* h = std::get_if<HarrisChain>(&chain)) {
            if (obs.kind == ObservableKind::harris_power) {
                harris_snapshots(h->params, ckpts, rng, out);
                return;
            }
        }
    }
    generic_snapshots(chain, obs, ckpts, rng, out);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Monte-Carlo tail estimation. All x in the grid are scored from one extreme
// statistic per trajectory; estimates across the grid share trajectories.
// ---------------------------------------------------------------------------
struct McTailOptions {
    unsigned workers = 0;        // 0 = resolve from environment/hardware
    bool force_generic = false;  // disable the segment fast paths (reference)
};

inline std::vector<TailEstimate> mc_tail(const ChainModel& chain, const Observable& obs,
                                         std::int64_t n, const std::vector<double>& x_grid,
                                         std::uint64_t trials, std::uint64_t seed,
                                         TailStatistic statistic,
                                         const McTailOptions& opt = {}) {
    if (trials < 100) throw std::invalid_argument("mc_tail: trials must be >= 100");
    if (n < 1) throw std::invalid_argument("mc_tail: n must be >= 1");
    if (x_grid.empty()) throw std::invalid_argument("mc_tail: empty x grid");
    if (!std::is_sorted(x_grid.begin(), x_grid.end()))
        throw std::invalid_argument("mc_tail: x grid must be sorted ascending");
    if (statistic == TailStatistic::functional)
        throw std::invalid_argument("mc_tail: functional statistic needs young_functional_tail");
    if (statistic == TailStatistic::excursion_sum)
        throw std::invalid_argument("mc_tail: excursion sums use excursion_sum_tail");

    const unsigned workers = resolve_workers(opt.workers);
    const std::vector<std::int64_t> ckpts{n};
    const std::size_t g = x_grid.size();

    // histogram of "number of grid points at or below the statistic"
    std::vector<std::vector<std::uint64_t>> hist(workers,
                                                 std::vector<std::uint64_t>(g + 1, 0));
    run_trial_ranges(trials, workers, [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
        auto& h = hist[w];
        SnapStat snap;
        for (std::uint64_t t = lo; t < hi; ++t) {
            RngStream rng(seed, t);
            detail::path_snapshots(chain, obs, ckpts, rng, &snap, opt.force_generic);
            const double stat = statistic == TailStatistic::max_abs_partial_sum
                                    ? snap.max_abs
                                    : snap.final_abs;
            const std::size_t idx = static_cast<std::size_t>(
                std::upper_bound(x_grid.begin(), x_grid.end(), stat) - x_grid.begin());
            h[idx] += 1;
        }
    });

    std::vector<std::uint64_t> total(g + 1, 0);
    for (unsigned w = 0; w < workers; ++w)
        for (std::size_t i = 0; i <= g; ++i) total[i] += hist[w][i];

    // hits at x_j = number of trials with statistic >= x_j, i.e. whose
    // upper-bound index exceeds j
    std::vector<TailEstimate> out;
    out.reserve(g);
    std::uint64_t suffix = 0;
    std::vector<std::uint64_t> hits(g, 0);
    for (std::size_t j = g; j-- > 0;) {
        suffix += total[j + 1];
        hits[j] = suffix;
    }
    for (std::size_t j = 0; j < g; ++j)
        out.push_back(make_tail_estimate(n, x_grid[j], hits[j], trials, statistic));
    return out;
}

// Shared-trajectory variant across an ascending n grid with one threshold per
// n: every trial is one path of length max(n_list), scored at checkpoints.
inline std::vector<TailEstimate> mc_tail_multi_n(const ChainModel& chain, const Observable& obs,
                                                 const std::vector<std::int64_t>& n_list,
                                                 const std::vector<double>& x_list,
                                                 std::uint64_t trials, std::uint64_t seed,
                                                 TailStatistic statistic,
                                                 const McTailOptions& opt = {}) {
    if (n_list.empty() || n_list.size() != x_list.size())
        throw std::invalid_argument("mc_tail_multi_n: n and x lists must match");
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw std::invalid_argument("mc_tail_multi_n: n list must be ascending");
    if (trials < 100) throw std::invalid_argument("mc_tail_multi_n: trials must be >= 100");
    if (statistic != TailStatistic::max_abs_partial_sum && statistic != TailStatistic::abs_sum)
        throw std::invalid_argument("mc_tail_multi_n: unsupported statistic");

    const unsigned workers = resolve_workers(opt.workers);
    const std::size_t m = n_list.size();
    std::vector<std::vector<std::uint64_t>> hits(workers, std::vector<std::uint64_t>(m, 0));
    run_trial_ranges(trials, workers, [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
        auto& h = hits[w];
        std::vector<SnapStat> snaps(m);
        for (std::uint64_t t = lo; t < hi; ++t) {
            RngStream rng(seed, t);
            detail::path_snapshots(chain, obs, n_list, rng, snaps.data(), opt.force_generic);
            for (std::size_t i = 0; i < m; ++i) {
                const double stat = statistic == TailStatistic::max_abs_partial_sum
                                        ? snaps[i].max_abs
                                        : snaps[i].final_abs;
                if (stat >= x_list[i]) h[i] += 1;
            }
        }
    });

    std::vector<TailEstimate> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t total = 0;
        for (unsigned w = 0; w < workers; ++w) total += hits[w][i];
        out.push_back(make_tail_estimate(n_list[i], x_list[i], total, trials, statistic));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Excursion-sum experiments.
// ---------------------------------------------------------------------------

// A finite excursion-length law on {1..K}; index j of tau_pmf is tau = j+1.
struct DiscreteExcursionLaw {
    std::vector<double> tau_pmf;
    std::vector<double> cdf;
    std::vector<std::uint64_t> thresh;
    double mass = 0.0;
    double mean_tau = 0.0;

    std::int64_t sample(RngStream& rng) const {
        return RenewalLaw::inverse_cdf_u64(thresh, rng.next_u64()) + 1;
    }
};

inline DiscreteExcursionLaw discrete_excursion_law(std::vector<double> tau_pmf) {
    DiscreteExcursionLaw law;
    law.tau_pmf = std::move(tau_pmf);
    if (law.tau_pmf.empty()) throw std::invalid_argument("discrete_excursion_law: empty pmf");
    law.cdf.resize(law.tau_pmf.size());
    double acc = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < law.tau_pmf.size(); ++j) {
        if (law.tau_pmf[j] < 0.0)
            throw std::invalid_argument("discrete_excursion_law: negative mass");
        acc += law.tau_pmf[j];
        law.cdf[j] = acc;
        mean += static_cast<double>(j + 1) * law.tau_pmf[j];
    }
    if (std::fabs(acc - 1.0) > 1e-12)
        throw std::invalid_argument("discrete_excursion_law: pmf must sum to 1");
    law.mass = acc;
    law.mean_tau = mean / acc;
    law.thresh = RenewalLaw::scale_cdf(law.cdf, law.mass);
    return law;
}

// Renewal excursion lengths tau = J + 1 conditioned on J <= K - 1.
inline DiscreteExcursionLaw truncated_renewal_excursions(const RenewalLaw& law, std::int64_t K) {
    if (K < 2) throw std::invalid_argument("truncated_renewal_excursions: K >= 2");
    std::vector<double> pmf(static_cast<std::size_t>(K), 0.0);
    double mass = 0.0;
    for (std::int64_t j = 1; j <= K - 1 && j <= static_cast<std::int64_t>(law.jump_pmf.size());
         ++j)
        mass += law.jump_pmf[static_cast<std::size_t>(j - 1)];
    for (std::int64_t j = 1; j <= K - 1 && j <= static_cast<std::int64_t>(law.jump_pmf.size());
         ++j)
        pmf[static_cast<std::size_t>(j)] = law.jump_pmf[static_cast<std::size_t>(j - 1)] / mass;
    return discrete_excursion_law(std::move(pmf));
}

// Excursion sources for sum statistics.
struct ExcursionSource {
    enum class Kind { renewal, harris, discrete } kind = Kind::renewal;
    const RenewalLaw* renewal = nullptr;
    const HarrisParams* harris = nullptr;
    const DiscreteExcursionLaw* discrete = nullptr;

    static ExcursionSource from(const RenewalLaw& law) { return {Kind::renewal, &law, nullptr, nullptr}; }
    static ExcursionSource from(const HarrisParams& p) { return {Kind::harris, nullptr, &p, nullptr}; }
    static ExcursionSource from(const DiscreteExcursionLaw& d) {
        return {Kind::discrete, nullptr, nullptr, &d};
    }

    double mean_tau() const {
        switch (kind) {
            case Kind::renewal: return renewal->mean_tau; // 1 + zeta(p)/zeta(p+1)
            case Kind::harris: return harris->mean_tau();  // p/(p-1)
            case Kind::discrete: return discrete->mean_tau;
        }
        return 0.0;
    }

    std::int64_t sample(RngStream& rng) const {
        switch (kind) {
            case Kind::renewal: return renewal->sample_jump(rng) + 1;
            case Kind::harris: {
                double y = harris->nu_draw(rng);
                return geometric_holding_time(y, rng);
            }
            case Kind::discrete: return discrete->sample(rng);
        }
        return 1;
    }
};

// Per-trial sums of n excursion lengths; slot-per-trial writes keep the
// output independent of the worker count.
inline std::vector<double> excursion_sum_samples(const ExcursionSource& src, std::int64_t n,
                                                 std::uint64_t trials, std::uint64_t seed,
                                                 unsigned workers = 0) {
    std::vector<double> sums(trials);
    run_trial_ranges(trials, resolve_workers(workers),
                     [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
                         for (std::uint64_t t = lo; t < hi; ++t) {
                             RngStream rng(seed, t);
                             std::int64_t acc = 0;
                             for (std::int64_t i = 0; i < n; ++i) acc += src.sample(rng);
                             sums[t] = static_cast<double>(acc);
                         }
                     });
    return sums;
}

// P(sum of n excursion lengths >= n E(tau) + x); the centering uses the
// law's closed-form mean, never an empirical one.
inline TailEstimate excursion_sum_tail(const ExcursionSource& src, std::int64_t n, double x,
                                       std::uint64_t trials, std::uint64_t seed,
                                       unsigned workers = 0) {
    if (x < 0.0) throw std::invalid_argument("excursion_sum_tail: requires x >= 0");
    const double threshold = static_cast<double>(n) * src.mean_tau() + x;
    std::vector<double> sums = excursion_sum_samples(src, n, trials, seed, workers);
    std::uint64_t hits = 0;
    for (double s : sums)
        if (s >= threshold) ++hits;
    TailEstimate e = make_tail_estimate(n, x, hits, trials, TailStatistic::excursion_sum);
    return e;
}

// Same event at a raw integer threshold, for oracle comparisons.
inline TailEstimate excursion_sum_tail_raw(const ExcursionSource& src, std::int64_t n,
                                           std::int64_t threshold, std::uint64_t trials,
                                           std::uint64_t seed, unsigned workers = 0) {
    std::vector<double> sums = excursion_sum_samples(src, n, trials, seed, workers);
    std::uint64_t hits = 0;
    for (double s : sums)
        if (s >= static_cast<double>(threshold)) ++hits;
    return make_tail_estimate(n, static_cast<double>(threshold), hits, trials,
                              TailStatistic::excursion_sum);
}

// Exact P(sum_{i<n} tau_i >= threshold) for a finite tau law by iterated
// convolution over the support lattice.
inline double dp_sum_tail(const std::vector<double>& pmf, std::int64_t n,
                          std::int64_t threshold) {
    if (pmf.empty()) throw std::invalid_argument("dp_sum_tail: empty pmf");
    double mass = 0.0;
    for (double q : pmf) {
        if (q < 0.0) throw std::invalid_argument("dp_sum_tail: negative mass");
        mass += q;
    }
    if (std::fabs(mass - 1.0) > 1e-12)
        throw std::invalid_argument("dp_sum_tail: pmf must sum to 1");
    if (n < 1) throw std::invalid_argument("dp_sum_tail: n >= 1");
    const std::int64_t K = static_cast<std::int64_t>(pmf.size());
    if (n * K > 10'000'000) throw std::length_error("dp_sum_tail: support exceeds desk scale");
    if (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(K) *
            static_cast<double>(K) >
        4e9)
        throw std::length_error("dp_sum_tail: convolution work exceeds desk scale");
    if (threshold <= n) return 1.0; // every tau is >= 1

    // dist[v] = P(sum of i excursions = v), support [i, i*K]
    std::vector<double> dist{1.0}; // sum of 0 excursions
    std::int64_t offset = 0;       // dist[v - offset]
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<double> next(dist.size() + static_cast<std::size_t>(K) - 1, 0.0);
        for (std::size_t v = 0; v < dist.size(); ++v) {
            if (dist[v] == 0.0) continue;
            for (std::int64_t j = 1; j <= K; ++j)
                next[v + static_cast<std::size_t>(j - 1)] += dist[v] * pmf[static_cast<std::size_t>(j - 1)];
        }
        dist = std::move(next);
        offset += 1;
    }
    double tail = 0.0;
    for (std::size_t v = 0; v < dist.size(); ++v) {
        const std::int64_t value = offset + static_cast<std::int64_t>(v);
        if (value >= threshold) tail += dist[v];
    }
    return std::min(1.0, tail);
}

// ---------------------------------------------------------------------------
// Scaling-exponent fits and constant calibration.
// ---------------------------------------------------------------------------
enum class ScalingMode { x_exponent, n_exponent };

struct ScalingFitResult {
    ScalingFit fit;
    std::vector<std::size_t> excluded; // indices dropped (p_hat = 0 or hits < 10)
};

inline ScalingFitResult scaling_fit(const std::vector<TailEstimate>& estimates, ScalingMode mode,
                                    std::optional<double> alpha = std::nullopt) {
    if (mode == ScalingMode::n_exponent && !alpha)
        throw std::invalid_argument("scaling_fit: n_exponent mode requires alpha");
    if (mode == ScalingMode::n_exponent) {
        // the estimates must lie on x = c n^alpha for one common c
        double c0 = 0.0;
        for (const auto& e : estimates) {
            double c = e.x / std::pow(static_cast<double>(e.n), *alpha);
            if (c0 == 0.0) c0 = c;
            else if (std::fabs(c - c0) > 1e-9 * c0)
                throw std::invalid_argument("scaling_fit: estimates not on x = c n^alpha");
        }
    }
    std::vector<double> lx, ly;
    ScalingFitResult out;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& e = estimates[i];
        if (e.hits < 10 || e.p_hat <= 0.0) {
            out.excluded.push_back(i);
            continue;
        }
        lx.push_back(std::log(mode == ScalingMode::x_exponent ? e.x
                                                              : static_cast<double>(e.n)));
        ly.push_back(std::log(e.p_hat));
    }
    if (lx.size() < 3) throw std::runtime_error("scaling_fit: fewer than 3 usable points");
    LinearFit lf = least_squares(lx, ly);
    out.fit.slope = lf.slope;
    out.fit.intercept = lf.intercept;
    out.fit.stderr_slope = lf.slope_stderr;
    out.fit.points_used = lf.points;
    return out;
}

// Smallest kappa whose kappa-scaled bound dominates every point estimate:
// max over estimates of p_hat / shape(n, x) where shape is the bound at kappa=1.
inline double kappa_fit(const std::vector<TailEstimate>& estimates,
                        const std::function<double(std::int64_t, double)>& bound_shape) {
    if (estimates.empty()) throw std::invalid_argument("kappa_fit: no estimates");
    double kappa = 0.0;
    for (const auto& e : estimates) {
        if (!(e.p_hat > 0.0)) throw std::invalid_argument("kappa_fit: requires p_hat > 0");
        const double shape = bound_shape(e.n, e.x);
        if (!(shape > 0.0)) throw std::invalid_argument("kappa_fit: bound shape must be positive");
        kappa = std::max(kappa, e.p_hat / shape);
    }
    return kappa;
}

// ---------------------------------------------------------------------------
// Limit-law diagnostics.
// ---------------------------------------------------------------------------
enum class LimitDiagnostic { ks_normal, hill_index };

inline double limit_diagnostic(double p, const std::vector<double>& normalized_samples,
                               LimitDiagnostic kind) {
    (void)p; // labels the experiment; the statistic itself does not use it
    if (normalized_samples.size() < 500)
        throw std::invalid_argument("limit_diagnostic: need >= 500 samples");
    switch (kind) {
        case LimitDiagnostic::ks_normal: return ks_distance_normal(normalized_samples);
        case LimitDiagnostic::hill_index: return hill_tail_index(normalized_samples, 0.05);
    }
    throw std::logic_error("limit_diagnostic: unknown kind");
}

// ---------------------------------------------------------------------------
// Block-decomposition check. B_i sums f0 over block i of length t; X_i is its
// exact conditional expectation given the state at time (i-2)t, computed from
// the closed iterates (K^m f0). Paths are simulated from time -t so that the
// first anchor exists.
// ---------------------------------------------------------------------------
struct BlockCheckReport {
    BlockParams params;
    double f_inf = 0.0;
    double cap = 0.0; // 2 ||f|| t
    double max_abs_X = 0.0;
    bool cap_ok = false;
    std::uint64_t paths = 0;
    std::int64_t blocks_per_path = 0;
    double mean_X = 0.0, se_X = 0.0;
    double mean_resid = 0.0, se_resid = 0.0;
    struct StateResidual {
        std::int64_t state = 0;
        std::uint64_t count = 0;
        double mean = 0.0;
        double se = 0.0;
    };
    std::vector<StateResidual> conditional;
    std::string warning;
};

inline BlockCheckReport block_check(const RenewalLaw& law, std::int64_t n, double x,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned workers = 0) {
    const double f_inf = law.indicator_sup();
    BlockParams bp = block_parameters(n, x, law.p, f_inf);
    if (bp.trivial_low || bp.trivial_high)
        throw std::invalid_argument("block_check: (n, x) falls in a trivial regime");
    const std::int64_t t = bp.t;
    const std::int64_t n_t = bp.n_t;
    const Observable obs = renewal_indicator_observable(law);

    // phi_sum(s) = sum_{m=t+1}^{2t} (K^m f0)(s); equals t*pi0 for s > 2t
    std::vector<double> a = renewal_indicator_iterates(law, 2 * t);
    std::vector<double> prefix(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) prefix[i + 1] = prefix[i] + a[i];
    auto phi_sum = [&](std::int64_t s) {
        if (s > 2 * t) return static_cast<double>(t) * law.pi0;
        const std::int64_t m_lo = std::max(t + 1, s);
        // sum of a_{m-s} for m in [m_lo, 2t] plus pi0 for each m < s in range
        double acc = prefix[static_cast<std::size_t>(2 * t - s + 1)] -
                     prefix[static_cast<std::size_t>(m_lo - s)];
        const std::int64_t below = std::max<std::int64_t>(0, std::min(s, 2 * t + 1) - (t + 1));
        return acc + law.pi0 * static_cast<double>(below);
    };

    struct Accum {
        double max_abs_X = 0.0;
        double sum_X = 0.0, sum_X2 = 0.0;
        double sum_r = 0.0, sum_r2 = 0.0;
        std::vector<double> state_sum, state_sum2;
        std::vector<std::uint64_t> state_count;
    };
    const std::int64_t state_bins = 12; // anchors 0..10, last bin pools the rest
    std::vector<Accum> acc(resolve_workers(workers));
    for (auto& A : acc) {
        A.state_sum.assign(static_cast<std::size_t>(state_bins), 0.0);
        A.state_sum2.assign(static_cast<std::size_t>(state_bins), 0.0);
        A.state_count.assign(static_cast<std::size_t>(state_bins), 0);
    }

    run_trial_ranges(trials, resolve_workers(workers),
                     [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
        Accum& A = acc[w];
        std::vector<double> path(static_cast<std::size_t>(n + t + 1));
        for (std::uint64_t trial = lo; trial < hi; ++trial) {
            RngStream rng(seed, trial);
            std::int64_t state = law.sample_stationary(rng); // time -t
            path[0] = static_cast<double>(state);
            for (std::int64_t k = 1; k <= n + t; ++k) {
                state = renewal_step(law, state, rng);
                path[static_cast<std::size_t>(k)] = static_cast<double>(state);
            }
            auto at = [&](std::int64_t time) { return path[static_cast<std::size_t>(time + t)]; };
            for (std::int64_t i = 1; i <= n_t; ++i) {
                double B = 0.0;
                for (std::int64_t j = (i - 1) * t + 1; j <= i * t; ++j)
                    B += observable_value(obs, at(j));
                const auto anchor = static_cast<std::int64_t>(at((i - 2) * t));
                const double X = phi_sum(anchor);
                const double r = B - X;
                A.max_abs_X = std::max(A.max_abs_X, std::fabs(X));
                A.sum_X += X;
                A.sum_X2 += X * X;
                A.sum_r += r;
                A.sum_r2 += r * r;
                const auto bin = static_cast<std::size_t>(
                    std::min<std::int64_t>(anchor, state_bins - 1));
                A.state_sum[bin] += r;
                A.state_sum2[bin] += r * r;
                A.state_count[bin] += 1;
            }
        }
    });

    BlockCheckReport rep;
    rep.params = bp;
    rep.f_inf = f_inf;
    rep.cap = 2.0 * f_inf * static_cast<double>(t);
    rep.paths = trials;
    rep.blocks_per_path = n_t;
    rep.warning = law.truncation_warning;

    double sum_X = 0.0, sum_X2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
    std::vector<double> ssum(static_cast<std::size_t>(state_bins), 0.0);
    std::vector<double> ssum2(static_cast<std::size_t>(state_bins), 0.0);
    std::vector<std::uint64_t> scount(static_cast<std::size_t>(state_bins), 0);
    for (const auto& A : acc) {
        rep.max_abs_X = std::max(rep.max_abs_X, A.max_abs_X);
        sum_X += A.sum_X;
        sum_X2 += A.sum_X2;
        sum_r += A.sum_r;
        sum_r2 += A.sum_r2;
        for (std::size_t b = 0; b < ssum.size(); ++b) {
            ssum[b] += A.state_sum[b];
            ssum2[b] += A.state_sum2[b];
            scount[b] += A.state_count[b];
        }
    }
    const double total = static_cast<double>(trials) * static_cast<double>(n_t);
    rep.cap_ok = rep.max_abs_X <= rep.cap + 1e-12;
    rep.mean_X = sum_X / total;
    rep.se_X = std::sqrt(std::max(0.0, sum_X2 / total - rep.mean_X * rep.mean_X) / total);
    rep.mean_resid = sum_r / total;
    rep.se_resid =
        std::sqrt(std::max(0.0, sum_r2 / total - rep.mean_resid * rep.mean_resid) / total);
    for (std::size_t b = 0; b < ssum.size(); ++b) {
        if (scount[b] < 30) continue;
        const double c = static_cast<double>(scount[b]);
        BlockCheckReport::StateResidual sr;
        sr.state = static_cast<std::int64_t>(b);
        sr.count = scount[b];
        sr.mean = ssum[b] / c;
        sr.se = std::sqrt(std::max(0.0, ssum2[b] / c - sr.mean * sr.mean) / c);
        rep.conditional.push_back(sr);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Separately Lipschitz functionals K(z_0..z_{n-1}) = sum w_i f(z_{i+1});
// the built-in observables are centered, so E K = 0 analytically and the
// independent-sample estimate of E K is reported as a diagnostic.
// ---------------------------------------------------------------------------
struct YoungTailResult {
    std::vector<TailEstimate> estimates;
    double mean_estimate = 0.0; // independent-sample estimate of E K
    double mean_se = 0.0;
};

inline YoungTailResult young_functional_tail(const ChainModel& chain,
                                             const std::vector<double>& weights,
                                             const Observable& obs, std::int64_t n,
                                             const std::vector<double>& x_grid,
                                             std::uint64_t trials, std::uint64_t seed,
                                             const McTailOptions& opt = {}) {
    if (static_cast<std::int64_t>(weights.size()) != n)
        throw std::invalid_argument("young_functional_tail: need one weight per coordinate");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("young_functional_tail: weights must be finite and >= 0");
    if (x_grid.empty() || !std::is_sorted(x_grid.begin(), x_grid.end()))
        throw std::invalid_argument("young_functional_tail: x grid must be sorted ascending");
    if (trials < 100) throw std::invalid_argument("young_functional_tail: trials >= 100");

    const bool uniform = std::all_of(weights.begin(), weights.end(),
                                     [](double w) { return w == 1.0; });

    YoungTailResult out;
    if (uniform) {
        // w == 1 reduces to the absolute final sum; same engine, same streams
        out.estimates =
            mc_tail(chain, obs, n, x_grid, trials, seed, TailStatistic::abs_sum, opt);
        for (auto& e : out.estimates) e.statistic = TailStatistic::functional;
    } else {
        const unsigned workers = resolve_workers(opt.workers);
        const std::size_t g = x_grid.size();
        std::vector<std::vector<std::uint64_t>> hist(workers,
                                                     std::vector<std::uint64_t>(g + 1, 0));
        run_trial_ranges(trials, workers, [&](unsigned w, std::uint64_t lo, std::uint64_t hi) {
            auto& h = hist[w];
            for (std::uint64_t t = lo; t < hi; ++t) {
                RngStream rng(seed, t);
                double state = stationary_sample(chain, rng);
                double value = weights[0] * observable_value(obs, state);
                for (std::int64_t i = 1; i < n; ++i) {
                    state = chain_step(chain, state, rng);
                    value += weights[static_cast<std::size_t>(i)] * observable_value(obs, state);
                }
                const double stat = std::fabs(value);
                const std::size_t idx = static_cast<std::size_t>(
                    std::upper_bound(x_grid.begin(), x_grid.end(), stat) - x_grid.begin());
                h[idx] += 1;
            }
        });
        std::vector<std::uint64_t> total(g + 1, 0);
        for (unsigned w = 0; w < workers; ++w)
            for (std::size_t i = 0; i <= g; ++i) total[i] += hist[w][i];
        std::uint64_t suffix = 0;
        std::vector<std::uint64_t> hits(g, 0);
        for (std::size_t j = g; j-- > 0;) {
            suffix += total[j + 1];
            hits[j] = suffix;
        }
        out.estimates.reserve(g);
        for (std::size_t j = 0; j < g; ++j)
            out.estimates.push_back(
                make_tail_estimate(n, x_grid[j], hits[j], trials, TailStatistic::functional));
    }

    // independent estimate of E K on its own stream namespace
    const std::uint64_t mean_trials = std::max<std::uint64_t>(1000, trials / 10);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t t = 0; t < mean_trials; ++t) {
        RngStream rng(seed, kMeanEstimationStreamBase + t);
        double state = stationary_sample(chain, rng);
        double value = weights[0] * observable_value(obs, state);
        for (std::int64_t i = 1; i < n; ++i) {
            state = chain_step(chain, state, rng);
            value += weights[static_cast<std::size_t>(i)] * observable_value(obs, state);
        }
        sum += value;
        sum2 += value * value;
    }
    const double m = static_cast<double>(mean_trials);
    out.mean_estimate = sum / m;
    out.mean_se = std::sqrt(std::max(0.0, sum2 / m - out.mean_estimate * out.mean_estimate) / m);
    return out;
}

} // namespace polymix
