#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polymix/io.hpp"
#include "polymix/verify.hpp"

namespace polymix_cli {

using namespace polymix;

// Exit codes: 0 pass, 1 verification failure, 2 validation error, 3 I/O
// error, 4 resolvability refusal.
enum ExitCode { kOk = 0, kVerifyFail = 1, kValidation = 2, kIo = 3, kUnresolvable = 4 };

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// ---------------------------------------------------------------------------
// Config file support: a flat JSON object whose keys are the long option
// names; command-line flags override file values.
// ---------------------------------------------------------------------------
inline std::vector<std::string> args_with_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") config_path = args[i + 1];
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw CliError(kIo, "cannot read config file: " + config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CliError(kValidation, std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw CliError(kValidation, "config must be a JSON object");

    // synthesize "--key value" pairs ahead of the real flags (subcommand
    // first); options use take-last policy so explicit flags win
    std::vector<std::string> merged;
    if (!args.empty()) merged.push_back(args[0]);
    for (auto& [key, value] : j.items()) {
        merged.push_back("--" + key);
        if (value.is_string()) merged.push_back(value.get<std::string>());
        else merged.push_back(value.dump());
    }
    for (std::size_t i = 1; i < args.size(); ++i) merged.push_back(args[i]);
    return merged;
}

// ---------------------------------------------------------------------------
// Shared experiment configuration.
// ---------------------------------------------------------------------------
struct ExperimentConfig {
    std::string chain = "renewal";
    double p = 0.0;
    double gamma = 1.0;
    std::string n_spec;
    std::string x_grid_spec;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::int64_t truncation_N = 1'000'000;
    std::string statistic = "max_abs_partial_sum";
    std::string out;
    unsigned workers = 0;
    std::string config; // consumed by args_with_config
};

inline void require_field(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw CliError(kValidation, "invalid --" + field + ": " + why);
}

inline ChainModel build_chain(const ExperimentConfig& cfg) {
    if (cfg.chain == "renewal" || cfg.chain == "tower") {
        require_field(cfg.p > 1.0, "p", "renewal/tower chains need p > 1");
        if (cfg.chain == "tower")
            require_field(cfg.p > 2.0, "p",
                          "the product-tower experiment covers p > 2 only");
        return RenewalChain{renewal_law(cfg.p, cfg.truncation_N), cfg.chain == "tower"};
    }
    if (cfg.chain == "harris") {
        require_field(cfg.p > 1.0, "p", "harris chain needs p > 1");
        require_field(cfg.gamma > 0.0, "gamma", "harris chain needs gamma > 0");
        return HarrisChain{harris_params(cfg.p, cfg.gamma)};
    }
    if (cfg.chain == "doubling") return DoublingChain{};
    throw CliError(kValidation, "invalid --chain: " + cfg.chain);
}

// "a..b" inclusive integer range
inline std::pair<std::int64_t, std::int64_t> parse_n_range(const std::string& spec) {
    auto dots = spec.find("..");
    try {
        if (dots == std::string::npos) {
            std::int64_t n = std::stoll(spec);
            return {n, n};
        }
        return {std::stoll(spec.substr(0, dots)), std::stoll(spec.substr(dots + 2))};
    } catch (const std::exception&) {
        throw CliError(kValidation, "invalid --n: expected N or LO..HI, got " + spec);
    }
}

// grid specs: bandwidth:K | log:LO:HI:K | linear:LO:HI:K
inline std::vector<double> parse_x_grid(const std::string& spec, std::int64_t n, double p) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        return parts;
    };
    auto parts = split(spec);
    try {
        if (parts.size() == 2 && parts[0] == "bandwidth") {
            std::size_t k = std::stoul(parts[1]);
            require_field(p > 1.0, "p", "bandwidth grids need p");
            require_field(k >= 1, "x-grid", "need at least one point");
            double lo = 4.0 * std::pow(static_cast<double>(n), 1.0 / p);
            double hi = static_cast<double>(n) / 16.0;
            require_field(lo < hi, "x-grid", "bandwidth is empty at this n");
            std::vector<double> g(k);
            for (std::size_t i = 0; i < k; ++i)
                g[i] = lo * std::pow(hi / lo,
                                     k == 1 ? 0.0
                                            : static_cast<double>(i) /
                                                  static_cast<double>(k - 1));
            return g;
        }
        if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "linear")) {
            double lo = std::stod(parts[1]), hi = std::stod(parts[2]);
            std::size_t k = std::stoul(parts[3]);
            require_field(k >= 1 && lo <= hi && (parts[0] == "linear" || lo > 0.0),
                          "x-grid", "bad grid bounds");
            std::vector<double> g(k);
            for (std::size_t i = 0; i < k; ++i) {
                double t = k == 1 ? 0.0
                                  : static_cast<double>(i) / static_cast<double>(k - 1);
                g[i] = parts[0] == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
            }
            return g;
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception&) {
    }
    throw CliError(kValidation,
                   "invalid --x-grid: expected bandwidth:K, log:LO:HI:K or linear:LO:HI:K");
}

inline void write_or_io_error(const std::string& path, const std::string& content) {
    try {
        write_text_file(path, content);
    } catch (const std::exception& e) {
        throw CliError(kIo, e.what());
    }
}

// ---------------------------------------------------------------------------
// mixing: exact or MC mixing curve plus a polynomial-rate fit.
// ---------------------------------------------------------------------------
inline int cmd_mixing(const ExperimentConfig& cfg, std::int64_t fit_lo, std::int64_t fit_hi,
                      std::size_t harris_bins) {
    require_field(!cfg.n_spec.empty(), "n", "mixing needs an n range");
    require_field(!cfg.out.empty(), "out", "mixing writes a CSV file");
    auto [n_lo, n_hi] = parse_n_range(cfg.n_spec);
    require_field(n_lo >= 1 && n_hi >= n_lo, "n", "empty range");

    MixingCurve curve;
    if (cfg.chain == "renewal" || cfg.chain == "tower") {
        require_field(cfg.p > 1.0, "p", "renewal mixing needs p > 1");
        RenewalLaw law = renewal_law(cfg.p, cfg.truncation_N);
        MixingCurve full = renewal_h1_curve(law, n_hi);
        for (const auto& e : full.entries)
            if (e.n >= n_lo) curve.entries.push_back(e);
    } else if (cfg.chain == "doubling") {
        for (std::int64_t n = n_lo; n <= n_hi; ++n)
            curve.entries.push_back({n, doubling_h1_affine({1.0, -0.5}, n), 0.0, "exact"});
    } else if (cfg.chain == "harris") {
        require_field(cfg.p > 1.0, "p", "harris mixing needs p > 1");
        std::vector<std::int64_t> ns;
        for (std::int64_t n = n_lo; n <= n_hi; ++n) ns.push_back(n);
        curve = harris_h1_curve(harris_params(cfg.p, cfg.gamma), ns, harris_bins);
    } else {
        throw CliError(kValidation, "invalid --chain: " + cfg.chain);
    }

    write_or_io_error(cfg.out, mixing_curve_csv(curve));

    if (fit_lo == 0) fit_lo = n_lo;
    if (fit_hi == 0) fit_hi = n_hi;
    nlohmann::json out;
    try {
        RateFitResult fit = rate_fit(curve, fit_lo, fit_hi);
        out = scaling_fit_json(fit.fit);
        out["op"] = "rate_fit";
        out["fit_range"] = {fit_lo, fit_hi};
        out["flag"] = fit.flag.empty() ? nlohmann::json() : nlohmann::json(fit.flag);
        out["excluded"] = fit.excluded;
    } catch (const std::exception& e) {
        out = {{"op", "rate_fit"}, {"error", e.what()}};
    }
    out["discretization_error"] = curve.discretization_error;
    std::cout << out.dump() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// tails: Monte-Carlo deviation probabilities over an x grid.
// ---------------------------------------------------------------------------
inline int cmd_tails(const ExperimentConfig& cfg) {
    require_field(!cfg.n_spec.empty(), "n", "tails needs n");
    require_field(!cfg.out.empty(), "out", "tails writes a CSV file");
    require_field(cfg.trials >= 100, "trials", "need at least 100 trials");
    require_field(!cfg.x_grid_spec.empty(), "x-grid", "tails needs an x grid");
    auto [n_lo, n_hi] = parse_n_range(cfg.n_spec);
    require_field(n_lo == n_hi, "n", "tails runs at a single n");
    const std::int64_t n = n_lo;

    ChainModel chain = build_chain(cfg);
    Observable obs = default_observable(chain);
    std::vector<double> grid = parse_x_grid(cfg.x_grid_spec, n, cfg.p);

    TailStatistic stat;
    if (cfg.statistic == "max_abs_partial_sum") stat = TailStatistic::max_abs_partial_sum;
    else if (cfg.statistic == "abs_sum") stat = TailStatistic::abs_sum;
    else throw CliError(kValidation, "invalid --statistic: " + cfg.statistic);

    // resolvability gate: a deterministic pilot fits the constant of the
    // n/x^p shape; grids whose largest x cannot reach ~20 expected hits are
    // refused rather than reported with empty cells
    if (cfg.chain != "doubling") {
        const std::uint64_t pilot = std::min<std::uint64_t>(cfg.trials / 10, 20'000);
        if (pilot >= 1000) {
            std::uint64_t hits = 0;
            std::vector<std::int64_t> ck{n};
            SnapStat snap;
            for (std::uint64_t t = 0; t < pilot; ++t) {
                RngStream rng(cfg.seed, kPilotStreamBase + t);
                detail::path_snapshots(chain, obs, ck, rng, &snap);
                double v = stat == TailStatistic::max_abs_partial_sum ? snap.max_abs
                                                                      : snap.final_abs;
                if (v >= grid.front()) ++hits;
            }
            double kappa_hat = hits > 0
                                   ? (static_cast<double>(hits) / pilot) *
                                         std::pow(grid.front(), cfg.p) / static_cast<double>(n)
                                   : 0.0;
            double predicted =
                kappa_hat * static_cast<double>(n) / std::pow(grid.back(), cfg.p) *
                static_cast<double>(cfg.trials);
            if (predicted < 20.0) {
                std::fprintf(stderr,
                             "unresolvable grid: predicted %.1f hits at x = %g "
                             "(need >= 20); raise --trials or shrink the grid\n",
                             predicted, grid.back());
                return kUnresolvable;
            }
        }
    }

    McTailOptions opt;
    opt.workers = cfg.workers;
    auto est = mc_tail(chain, obs, n, grid, cfg.trials, cfg.seed, stat, opt);

    TailCsvContext ctx;
    ctx.chain = cfg.chain;
    ctx.p = cfg.p;
    if (cfg.chain == "harris") ctx.gamma = cfg.gamma;
    ctx.seed = cfg.seed;
    write_or_io_error(cfg.out, tail_estimates_csv(est, ctx));
    return kOk;
}

// ---------------------------------------------------------------------------
// bounds: evaluate one inequality right-hand side as a JSON line.
// ---------------------------------------------------------------------------
inline std::vector<double> parse_weights(const std::string& spec) {
    if (spec.rfind("ones:", 0) == 0) {
        std::size_t k = std::stoul(spec.substr(5));
        return std::vector<double>(k, 1.0);
    }
    std::vector<double> w;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) w.push_back(std::stod(tok));
    return w;
}

inline int cmd_bounds(const std::string& op, const std::unordered_map<std::string, std::string>& kv) {
    auto get = [&](const std::string& key, std::optional<double> dflt =
                                               std::nullopt) -> double {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (dflt) return *dflt;
            throw CliError(kValidation, "bounds " + op + ": missing --" + key);
        }
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw CliError(kValidation, "bounds " + op + ": bad number for --" + key);
        }
    };
    auto get_str = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) throw CliError(kValidation, "bounds " + op + ": missing --" + key);
        return it->second;
    };

    nlohmann::json inputs;
    for (auto& [k, v] : kv) inputs[k] = v;

    try {
        if (op == "moddev") {
            std::string cs = get_str("case");
            ModDevCase c = cs == "p_gt_2"   ? ModDevCase::p_gt_2
                           : cs == "p_eq_2" ? ModDevCase::p_eq_2
                           : cs == "p_lt_2" ? ModDevCase::p_lt_2
                                            : throw CliError(kValidation,
                                                             "bounds moddev: bad --case " + cs);
            auto b = moddev_bound(c, static_cast<std::int64_t>(get("n")), get("x"), get("p"),
                                  get("r", 3.0), get("kappa", 1.0));
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "rio-fn") {
            auto b = rio_fn_bound(static_cast<std::int64_t>(get("n")), get("x"), get("p"),
                                  get("r"), get("C", 1.0));
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "fuk-constants") {
            auto f = fuk_constants(get("p"), kv.count("reverse") > 0);
            nlohmann::json j{{"op", "fuk_constants"},
                             {"p", f.p},
                             {"beta", f.beta},
                             {"c_star", f.c_star},
                             {"reverse", f.reverse}};
            std::cout << j.dump() << "\n";
        } else if (op == "fuk") {
            auto b = fuk_bound(get("p"), get("x"), get("sum-tail-probs"),
                               get("sum-weak-caps"), get("sum-var-caps"),
                               kv.count("reverse") > 0);
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "weak-fuk") {
            double p = get("p");
            auto b = weak_fuk_bound(p, get("x"), parse_weights(get_str("M")),
                                    get("var-cap-sum"), get("Cp", weak_fuk_default_Cp(p)));
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "rosenthal") {
            auto b = rosenthal_bound(get("r"), static_cast<std::int64_t>(get("N")), get("x"),
                                     get("l1-coupling"), get("r-moment"),
                                     get("second-moment"), get("delta-sum"),
                                     get("multiplier", 1.0), kv.count("delta-sum-raw") > 0);
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "young") {
            auto b = young_bound(get("p"), parse_weights(get_str("L")), get("x"),
                                 get("kappa", 1.0));
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "maximal-mk") {
            auto L = parse_weights(get_str("L"));
            auto c0 = kv.count("c0") ? parse_weights(get_str("c0")) : default_c0(L.size());
            double v = maximal_Mk(L, c0, get("C", 1.0), static_cast<std::size_t>(get("k")),
                                  get("p"));
            nlohmann::json j{{"op", "maximal_Mk"}, {"inputs", inputs}, {"value", v}};
            std::cout << j.dump() << "\n";
        } else if (op == "block-params") {
            BlockParams bp = block_parameters(static_cast<std::int64_t>(get("n")), get("x"),
                                              get("p"), get("f-inf"), get("kappa", 1.0));
            nlohmann::json j{{"op", "block_parameters"},
                             {"inputs", inputs},
                             {"t", bp.t},
                             {"u", bp.u},
                             {"n_t", bp.n_t},
                             {"n_u", bp.n_u},
                             {"y", bp.y},
                             {"trivial_low", bp.trivial_low},
                             {"trivial_high", bp.trivial_high}};
            std::cout << j.dump() << "\n";
        } else if (op == "freedman") {
            auto b = freedman_terms(get("x"), get("y"), get("f-inf"),
                                    static_cast<std::int64_t>(get("n")), get("p"));
            std::cout << breakdown_json(b, inputs).dump() << "\n";
        } else if (op == "harris-lower-constant") {
            double v = harris_lower_constant(get("p"), get("gamma"));
            nlohmann::json j{{"op", "harris_lower_constant"}, {"inputs", inputs}, {"value", v}};
            std::cout << j.dump() << "\n";
        } else {
            std::fprintf(stderr,
                         "unknown bounds op '%s'; valid: moddev rio-fn fuk-constants fuk "
                         "weak-fuk rosenthal young maximal-mk block-params freedman "
                         "harris-lower-constant\n",
                         op.c_str());
            return kValidation;
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError(kValidation, std::string("bounds ") + op + ": " + e.what());
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// verify: named suites of checks, one JSON line per check.
// ---------------------------------------------------------------------------
inline int cmd_verify(const std::string& suite, double p, std::uint64_t seed,
                      double trials_scale) {
    using namespace polymix::verify;
    std::vector<Check> checks;
    if (suite == "kac") {
        checks = kac_consistency(p);
        auto harris = harris_identities(trials_scale, seed);
        checks.insert(checks.end(), harris.begin(), harris.end());
    } else if (suite == "oracle") {
        checks = doubling_closed_form();
        auto oracle = oracle_equivalence(trials_scale, seed);
        checks.insert(checks.end(), oracle.begin(), oracle.end());
        auto consts = explicit_constants();
        checks.insert(checks.end(), consts.begin(), consts.end());
    } else if (suite == "lower_bound") {
        checks = lower_bound_x_scaling(trials_scale, seed);
        auto harris = harris_lower_bound(trials_scale, seed);
        checks.insert(checks.end(), harris.begin(), harris.end());
    } else if (suite == "scaling") {
        checks = mixing_rate();
        auto dom = upper_bound_domination(trials_scale, seed);
        checks.insert(checks.end(), dom.begin(), dom.end());
        auto young = young_domination(trials_scale, seed);
        checks.insert(checks.end(), young.begin(), young.end());
        auto moddev = moddev_n_scaling(trials_scale, seed);
        checks.insert(checks.end(), moddev.begin(), moddev.end());
    } else if (suite == "limits") {
        checks = limit_diagnostics(trials_scale, seed);
    } else if (suite == "blocks") {
        checks = block_decomposition(trials_scale, seed);
    } else if (suite == "quadrature") {
        checks = quadrature_inequality();
    } else {
        std::fprintf(stderr,
                     "unknown suite '%s'; valid: kac oracle lower_bound scaling limits "
                     "blocks quadrature\n",
                     suite.c_str());
        return kValidation;
    }
    bool all = true;
    for (const auto& c : checks) {
        std::cout << check_json(c).dump() << "\n";
        all = all && c.pass;
    }
    return all ? kOk : kVerifyFail;
}

// ---------------------------------------------------------------------------
// report: concatenate prior outputs into one JSON-lines artifact.
// ---------------------------------------------------------------------------
inline int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::ostringstream out;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw CliError(kIo, "cannot read input: " + path);
        std::string line;
        bool is_csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
        if (is_csv) {
            std::vector<std::string> header;
            if (std::getline(in, line)) {
                std::stringstream hs(line);
                std::string col;
                while (std::getline(hs, col, ',')) header.push_back(col);
            }
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                nlohmann::json row;
                std::stringstream ls(line);
                std::string cell;
                std::size_t i = 0;
                while (std::getline(ls, cell, ',') && i < header.size())
                    row[header[i++]] = cell;
                nlohmann::json rec{{"source", path}, {"kind", "csv"}, {"row", row}};
                out << rec.dump() << "\n";
            }
        } else {
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                nlohmann::json parsed;
                try {
                    parsed = nlohmann::json::parse(line);
                } catch (const std::exception&) {
                    parsed = line;
                }
                nlohmann::json rec{{"source", path}, {"kind", "jsonl"}, {"record", parsed}};
                out << rec.dump() << "\n";
            }
        }
    }
    write_or_io_error(out_path, out.str());
    return kOk;
}

// ---------------------------------------------------------------------------
inline int cli_main(int argc, char** argv) {
    CLI::App app{"polymix: simulation and verification toolkit for polynomially "
                 "mixing Markov chains"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::int64_t fit_lo = 0, fit_hi = 0;
    std::size_t harris_bins = 4096;
    std::string suite, bounds_op, report_out;
    double trials_scale = 1.0;
    std::vector<std::string> report_inputs;

    auto add_common = [&](CLI::App* sub, bool with_grid) {
        sub->add_option("--chain", cfg.chain, "renewal|harris|doubling|tower")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--p", cfg.p, "mixing exponent p")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--gamma", cfg.gamma, "harris observable exponent")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--n", cfg.n_spec, "path length N or range LO..HI")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--truncation-N", cfg.truncation_N, "renewal truncation")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--out", cfg.out, "output file path")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--workers", cfg.workers, "worker threads (0 = auto)")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--config", cfg.config, "JSON config file; flags override")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        if (with_grid) {
            sub->add_option("--x-grid", cfg.x_grid_spec,
                            "bandwidth:K | log:LO:HI:K | linear:LO:HI:K")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            sub->add_option("--trials", cfg.trials, "Monte-Carlo trials")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            sub->add_option("--seed", cfg.seed, "master seed")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            sub->add_option("--statistic", cfg.statistic,
                            "max_abs_partial_sum | abs_sum")
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    };

    CLI::App* mixing = app.add_subcommand("mixing", "mixing curve and rate fit");
    add_common(mixing, false);
    mixing->add_option("--fit-lo", fit_lo, "rate-fit window start (default: n range)");
    mixing->add_option("--fit-hi", fit_hi, "rate-fit window end");
    mixing->add_option("--bins", harris_bins, "harris discretization bins");

    CLI::App* tails = app.add_subcommand("tails", "tail probability estimates");
    add_common(tails, true);

    CLI::App* bounds = app.add_subcommand("bounds", "evaluate an inequality bound");
    bounds->add_option("op", bounds_op, "bound name")->required();
    bounds->allow_extras();

    CLI::App* ver = app.add_subcommand("verify", "verification suites");
    add_common(ver, true);
    ver->add_option("--suite", suite,
                    "kac|oracle|lower_bound|scaling|limits|blocks|quadrature")
        ->required();
    ver->add_option("--trials-scale", trials_scale,
                    "scale factor on suite trial counts (exploratory)");

    CLI::App* report = app.add_subcommand("report", "concatenate outputs to JSON lines");
    report->add_option("--out", report_out, "output JSON-lines file")->required();
    report->add_option("inputs", report_inputs, "input CSV/JSONL files")->required();

    try {
        std::vector<std::string> args = args_with_config(argc, argv);
        std::vector<const char*> cargs{argv[0]};
        for (auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());

        if (app.got_subcommand(mixing))
            return cmd_mixing(cfg, fit_lo, fit_hi, harris_bins);
        if (app.got_subcommand(tails)) return cmd_tails(cfg);
        if (app.got_subcommand(bounds)) {
            std::unordered_map<std::string, std::string> kv;
            auto extras = bounds->remaining();
            for (std::size_t i = 0; i < extras.size(); ++i) {
                std::string key = extras[i];
                if (key.rfind("--", 0) != 0)
                    throw CliError(kValidation, "bounds: unexpected token " + key);
                key = key.substr(2);
                if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0)
                    kv[key] = extras[++i];
                else
                    kv[key] = "1"; // boolean flag
            }
            return cmd_bounds(bounds_op, kv);
        }
        if (app.got_subcommand(ver)) return cmd_verify(suite, cfg.p, cfg.seed, trials_scale);
        if (app.got_subcommand(report)) return cmd_report(report_inputs, report_out);
        return kValidation;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::fprintf(stderr, "%s\n", e.what());
        return kValidation;
    } catch (const CliError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kValidation;
    }
}

} // namespace polymix_cli
