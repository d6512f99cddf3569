#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymix/bounds.hpp"
#include "polymix/mixing.hpp"
#include "polymix/tails.hpp"

namespace polymix {

// Shortest round-trip decimal form; locale-free and identical across runs.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Experiment context echoed into every tail CSV row.
struct TailCsvContext {
    std::string chain;
    double p = 0.0;
    std::optional<double> gamma;
    std::uint64_t seed = 0;
};

inline constexpr const char* kTailCsvHeader =
    "statistic,chain,p,gamma,n,x,hits,trials,p_hat,ci_low,ci_high,seed";

inline std::string tail_estimates_csv(const std::vector<TailEstimate>& estimates,
                                      const TailCsvContext& ctx) {
    std::ostringstream out;
    out << kTailCsvHeader << '\n';
    for (const auto& e : estimates) {
        out << tail_statistic_name(e.statistic) << ',' << ctx.chain << ','
            << format_double(ctx.p) << ',' << (ctx.gamma ? format_double(*ctx.gamma) : "")
            << ',' << format_int(e.n) << ',' << format_double(e.x) << ',' << e.hits << ','
            << e.trials << ',' << format_double(e.p_hat) << ',' << format_double(e.ci_low)
            << ',' << format_double(e.ci_high) << ',' << ctx.seed << '\n';
    }
    return out.str();
}

inline constexpr const char* kMixingCsvHeader = "n,coeff,stderr,method";

inline std::string mixing_curve_csv(const MixingCurve& curve) {
    std::ostringstream out;
    out << kMixingCsvHeader << '\n';
    for (const auto& e : curve.entries)
        out << format_int(e.n) << ',' << format_double(e.coeff) << ','
            << format_double(e.stderr_coeff) << ',' << e.method << '\n';
    return out.str();
}

inline nlohmann::json breakdown_json(const BoundBreakdown& b, nlohmann::json inputs) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : b.terms) terms.push_back({{"label", t.label}, {"value", t.value}});
    nlohmann::json j{{"op", b.op},
                     {"inputs", std::move(inputs)},
                     {"terms", std::move(terms)},
                     {"total", b.total}};
    j["regime"] = b.regime.empty() ? nlohmann::json() : nlohmann::json(b.regime);
    return j;
}

inline nlohmann::json scaling_fit_json(const ScalingFit& fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"stderr", fit.stderr_slope},
            {"points_used", fit.points_used}};
}

inline nlohmann::json block_check_json(const BlockCheckReport& rep) {
    nlohmann::json cond = nlohmann::json::array();
    for (const auto& sr : rep.conditional)
        cond.push_back({{"state", sr.state},
                        {"count", sr.count},
                        {"mean", sr.mean},
                        {"se", sr.se}});
    return {{"op", "block_check"},
            {"t", rep.params.t},
            {"u", rep.params.u},
            {"n_t", rep.params.n_t},
            {"n_u", rep.params.n_u},
            {"cap", rep.cap},
            {"max_abs_X", rep.max_abs_X},
            {"cap_ok", rep.cap_ok},
            {"paths", rep.paths},
            {"blocks_per_path", rep.blocks_per_path},
            {"mean_X", rep.mean_X},
            {"se_X", rep.se_X},
            {"mean_resid", rep.mean_resid},
            {"se_resid", rep.se_resid},
            {"conditional_residuals", std::move(cond)},
            {"warning", rep.warning}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::ios_base::failure("write failed: " + path);
}

} // namespace polymix
