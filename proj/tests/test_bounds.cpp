#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "polymix/bounds.hpp"

using namespace polymix;

TEST_CASE("moddev bound shapes") {
    // p > 2: kappa n x^-p + kappa exp(-x^2/(kappa n))
    auto b = moddev_bound(ModDevCase::p_gt_2, 10'000, 500.0, 3.0, 0.0, 1.0);
    CHECK(b.terms.size() == 2);
    CHECK(b.terms[0].label == "poly_tail");
    CHECK(b.terms[0].value == doctest::Approx(8e-5).epsilon(1e-12));
    CHECK(b.terms[1].label == "exp_gaussian");
    CHECK(b.terms[1].value == doctest::Approx(std::exp(-25.0)).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(8e-5 + std::exp(-25.0)).epsilon(1e-12));

    auto c = moddev_bound(ModDevCase::p_lt_2, 100, 10.0, 1.5, 0.0, 1.0);
    CHECK(c.total == doctest::Approx(100.0 / std::pow(10.0, 1.5)).epsilon(1e-12));
    CHECK(c.total == doctest::Approx(3.1623).epsilon(1e-4));

    // kappa = 0 collapses every case to 0
    CHECK(moddev_bound(ModDevCase::p_gt_2, 100, 5.0, 3.0, 0.0, 0.0).total == 0.0);
    CHECK(moddev_bound(ModDevCase::p_eq_2, 100, 5.0, 2.0, 3.0, 0.0).total == 0.0);
    CHECK(moddev_bound(ModDevCase::p_lt_2, 100, 5.0, 1.5, 0.0, 0.0).total == 0.0);

    CHECK_THROWS_AS(moddev_bound(ModDevCase::p_eq_2, 100, 5.0, 2.0, 4.5, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(moddev_bound(ModDevCase::p_gt_2, 100, -1.0, 3.0, 0.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(moddev_bound(ModDevCase::p_gt_2, 100, 5.0, 1.5, 0.0, 1.0),
                    std::domain_error);
}

TEST_CASE("moddev p=2 case approaches the r->2 limit continuously") {
    const std::int64_t n = 1000;
    const double x = 50.0;
    double limit = 1.0 * n / (x * x) +
                   (static_cast<double>(n) * std::log(static_cast<double>(n))) / (x * x);
    double prev_gap = 1e300;
    for (double r : {2.5, 2.1, 2.01, 2.001}) {
        double total = moddev_bound(ModDevCase::p_eq_2, n, x, 2.0, r, 1.0).total;
        double gap = std::fabs(total - limit);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-2 * limit);
}

TEST_CASE("rio fuk-nagaev bound") {
    auto b = rio_fn_bound(100, 10.0, 3.0, 4.0, 1.0);
    CHECK(b.terms.size() == 2);
    CHECK(b.total == doctest::Approx(1.1).epsilon(1e-12));

    const double e = std::exp(1.0);
    auto c = rio_fn_bound(static_cast<std::int64_t>(1), 1.0, 2.0, 2.0, 1.0);
    (void)c;
    // log(n) needs n = e exactly; evaluate the formula directly at n = e via
    // the p = 2 branch structure: C{ n/x^2 + n^{r/2}/x^r + (n log n)^{r/2}/x^r }
    // with n = e, x = 1, r = 2 each term equals e.
    // The integer signature cannot take n = e, so check the algebra explicitly.
    double total = e / 1.0 + std::pow(e, 1.0) + std::pow(e * std::log(e), 1.0);
    CHECK(total == doctest::Approx(3.0 * e).epsilon(1e-12));

    CHECK(rio_fn_bound(100, 10.0, 3.0, 4.0, 0.0).total == 0.0);
}

TEST_CASE("fuk constants match hand arithmetic") {
    auto f2 = fuk_constants(2.0, false);
    CHECK(f2.beta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f2.c_star == doctest::Approx(1.0 / (8.0 * std::exp(2.0))).epsilon(1e-12));
    CHECK(f2.c_star == doctest::Approx(0.0169169).epsilon(1e-4));

    auto f3 = fuk_constants(3.0, false);
    CHECK(f3.beta == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(f3.c_star == doctest::Approx(0.16 / (2.0 * std::exp(3.0))).epsilon(1e-12));
    CHECK(f3.c_star == doctest::Approx(0.0039830).epsilon(1e-4));

    auto r3 = fuk_constants(3.0, true);
    CHECK(r3.c_star == doctest::Approx(0.16 / (8.0 * std::exp(3.0))).epsilon(1e-12));
    CHECK(r3.c_star == doctest::Approx(0.00099574).epsilon(1e-4));

    CHECK_THROWS_AS(fuk_constants(1.9, false), std::domain_error);
}

TEST_CASE("fuk bound composition") {
    auto b = fuk_bound(2.0, 1.0, 0.0, 1.0, 1.0, false);
    // 0 + 2/(0.5^2) + 2 exp(-c2*)
    double expected = 8.0 + 2.0 * std::exp(-1.0 / (8.0 * std::exp(2.0)));
    CHECK(b.total == doctest::Approx(expected).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(9.96646).epsilon(1e-5));

    auto zero = fuk_bound(2.0, 1.0, 0.0, 0.0, 0.0, false);
    CHECK(zero.total == 0.0);
    CHECK(!zero.regime.empty());

    // reverse constants dominate forward at identical inputs
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unif(0.1, 5.0);
    for (int i = 0; i < 200; ++i) {
        double p = 2.0 + unif(gen);
        double x = unif(gen);
        double s1 = unif(gen), s2 = unif(gen), s3 = unif(gen);
        CHECK(fuk_bound(p, x, s1, s2, s3, true).total >=
              fuk_bound(p, x, s1, s2, s3, false).total);
    }
}

TEST_CASE("weak fuk bound") {
    auto b = weak_fuk_bound(2.0, 1.0, {1.0}, 1.0, 1.0);
    CHECK(b.total == doctest::Approx(1.0 + 4.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(2.47152).epsilon(1e-5));

    // k ones: C_p k / x^p + 4 exp(-x^2/(C_p v))
    std::vector<double> M(7, 1.0);
    auto c = weak_fuk_bound(3.0, 2.0, M, 5.0, 2.0);
    CHECK(c.terms[0].value == doctest::Approx(2.0 * 7.0 / 8.0).epsilon(1e-12));
    CHECK(c.terms[1].value == doctest::Approx(4.0 * std::exp(-4.0 / 10.0)).epsilon(1e-12));

    // monotone decrease to 0 in x
    double prev = 1e300;
    for (double x : {1.0, 2.0, 5.0, 10.0, 100.0, 1e4}) {
        double total = weak_fuk_bound(3.0, x, M, 5.0, 2.0).total;
        CHECK(total < prev);
        prev = total;
    }
    CHECK(prev < 1e-8);
    CHECK_THROWS_AS(weak_fuk_bound(3.0, 1.0, M, 5.0, 0.0), std::domain_error);
}

TEST_CASE("default weak-fuk constant is the documented arithmetic") {
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        const double q = p + 1.0;
        const double bq = q / (q + 2.0);
        double expected = std::max(std::pow(bq, -p), std::pow(2.0, q + 1.0) *
                                                         std::pow(bq, -q) * q *
                                                         std::pow(bq, q - p) / (q - p));
        CHECK(weak_fuk_default_Cp(p) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("rosenthal bound") {
    CHECK(rosenthal_delta(4.0) == doctest::Approx(0.5));
    CHECK(rosenthal_delta(2.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(rosenthal_delta(2.0), std::domain_error);

    auto b = rosenthal_bound(4.0, 4, 2.0, 0.0, 1.0, 1.0, 0.0);
    CHECK(b.terms.size() == 4);
    CHECK(b.total == doctest::Approx(4.0 / 16.0 + 16.0 / 16.0).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(1.25).epsilon(1e-12));

    auto zero = rosenthal_bound(4.0, 4, 2.0, 0.0, 0.0, 0.0, 0.0);
    CHECK(zero.total == 0.0);

    // raw delta-sum input is raised to r/(2 delta) and flagged
    auto raw = rosenthal_bound(4.0, 4, 2.0, 0.0, 0.0, 0.0, 2.0, 1.0, true);
    CHECK(raw.terms[3].value ==
          doctest::Approx(4.0 / 16.0 * std::pow(2.0, 4.0)).epsilon(1e-12));
    CHECK(!raw.regime.empty());
}

TEST_CASE("young bound shapes") {
    auto b = young_bound(3.0, {1.0}, 1.0, 1.0);
    CHECK(b.total == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(1.36788).epsilon(1e-5));

    // p = 2, L == 1, n = 100: denominator factor 100 (1 + log 10)
    std::vector<double> ones(100, 1.0);
    CHECK(young_p2_log_denominator(ones) ==
          doctest::Approx(100.0 * (1.0 + std::log(10.0))).epsilon(1e-12));
    CHECK(young_p2_log_denominator(ones) == doctest::Approx(330.259).epsilon(1e-5));
    auto b2 = young_bound(2.0, ones, 5.0, 1.0);
    CHECK(b2.terms[1].value ==
          doctest::Approx(std::exp(-25.0 / young_p2_log_denominator(ones))).epsilon(1e-12));

    // homogeneity: scaling L by c scales sum L^p/x^p by c^p and leaves the
    // p = 2 parenthetical factor unchanged
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> unif(0.1, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> L(20);
        for (auto& v : L) v = unif(gen);
        double cscale = unif(gen);
        std::vector<double> Lc = L;
        for (auto& v : Lc) v *= cscale;
        double p = 2.0 + unif(gen);
        auto base = young_bound(p, L, 7.0, 1.0);
        auto scaled = young_bound(p, Lc, 7.0, 1.0);
        CHECK(scaled.terms[0].value ==
              doctest::Approx(base.terms[0].value * std::pow(cscale, p)).epsilon(1e-10));
        double sumL = 0.0, sumL2 = 0.0;
        for (double v : L) {
            sumL += v;
            sumL2 += v * v;
        }
        double factor = 1.0 + std::log(sumL) - 0.5 * std::log(sumL2);
        double factor_scaled = 1.0 + std::log(cscale * sumL) -
                               0.5 * std::log(cscale * cscale * sumL2);
        CHECK(factor_scaled == doctest::Approx(factor).epsilon(1e-12));
    }
}

TEST_CASE("maximal Mk") {
    std::vector<double> zeros_c0(10, 0.0);
    std::vector<double> ones(10, 1.0);
    for (std::size_t k : {0u, 3u, 9u})
        CHECK(maximal_Mk(ones, zeros_c0, 1.0, k, 2.5) == doctest::Approx(1.0));

    std::vector<double> spike{1.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < spike.size(); ++k) {
        double expect = std::pow(1.0 / static_cast<double>(k + 1), 3.0);
        CHECK(maximal_Mk(spike, zeros_c0, 1.0, k, 3.0) == doctest::Approx(expect));
    }

    // Hardy-Littlewood: sum_k sup-term <= (2p/(p-1))^p sum L^p
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double p = 2.0 + 2.0 * unif(gen) / 2.0;
        std::vector<double> L(64);
        double sum_Lp = 0.0;
        for (auto& v : L) {
            v = unif(gen);
            sum_Lp += std::pow(v, p);
        }
        double total_sup = 0.0;
        for (std::size_t k = 0; k < L.size(); ++k)
            total_sup += maximal_Mk(L, zeros_c0, 1.0, k, p); // conv part is 0
        double c_hl = std::pow(2.0 * p / (p - 1.0), p);
        CHECK(total_sup <= c_hl * sum_Lp + 1e-9);
    }
}

TEST_CASE("block parameters") {
    BlockParams bp = block_parameters(10'000, 300.0, 2.0, 1.0);
    CHECK(bp.t == 100);
    CHECK(bp.u == 1);
    CHECK(bp.n_t == 100);
    CHECK_FALSE(bp.trivial_low);
    CHECK_FALSE(bp.trivial_high);
    CHECK(bp.n_t >= 4 * bp.u);
    CHECK(2.0 * 1.0 * static_cast<double>(bp.t * bp.u) <= 300.0);

    CHECK(block_parameters(10'000, 10'000.0, 2.0, 1.0).trivial_high);
    CHECK(block_parameters(10'000, 100.0, 2.0, 1.0).trivial_low); // x = n^{1/2} f_inf

    // invariants hold on random nontrivial instances
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 500; ++rep) {
        std::int64_t n = 200 + static_cast<std::int64_t>(unif(gen) * 200'000);
        double p = 2.0 + 2.5 * unif(gen);
        double f_inf = 0.2 + 2.0 * unif(gen);
        double lo = 2.0 * f_inf * std::pow(static_cast<double>(n), 1.0 / p);
        double hi = f_inf * static_cast<double>(n) / 4.0;
        if (lo >= hi) continue;
        double x = lo + (hi - lo) * unif(gen);
        BlockParams b = block_parameters(n, x, p, f_inf);
        if (b.trivial_low || b.trivial_high) continue;
        CHECK(b.u >= 1);
        CHECK(b.n_t >= 4 * b.u);
        CHECK(2.0 * f_inf * static_cast<double>(b.t) * static_cast<double>(b.u) <= x * (1 + 1e-12));
        CHECK(b.y > 0.0);
    }
}

TEST_CASE("freedman terms") {
    auto b = freedman_terms(4.0, 9.0, 1.0, 100, 2.0);
    CHECK(b.terms[0].value == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(b.terms[0].value == doctest::Approx(0.735759).epsilon(1e-5));
    // y -> infinity lets the first term approach 2
    CHECK(freedman_terms(4.0, 1e18, 1.0, 100, 2.0).terms[0].value ==
          doctest::Approx(2.0).epsilon(1e-9));
    // x -> infinity kills both terms
    auto far = freedman_terms(1e9, 9.0, 1.0, 100, 2.0);
    CHECK(far.total < 1e-300);
}

TEST_CASE("harris lower constant") {
    // p = 2, gamma = 1: c = 1/2, eta = 3/4, C = (0.375/48)^2 / 4 * 2
    double c = harris_lower_constant(2.0, 1.0);
    CHECK(c == doctest::Approx(0.25 * std::pow(0.375 / 48.0, 2.0) * 2.0).epsilon(1e-14));
    CHECK(c == doctest::Approx(3.0518e-5).epsilon(1e-4));

    // c_{a,gamma} decreasing in gamma, so the constant vanishes as gamma grows
    double prev = harris_lower_constant(2.0, 1.0);
    for (double g : {2.0, 5.0, 20.0, 100.0}) {
        double cur = harris_lower_constant(2.0, g);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("bound totals are nonincreasing in x") {
    std::mt19937_64 gen(999);
    std::uniform_real_distribution<double> unif(0.1, 4.0);
    std::vector<double> L{1.0, 0.4, 2.0, 0.7};
    std::vector<double> M{0.5, 1.5, 1.0};
    for (int rep = 0; rep < 100; ++rep) {
        std::int64_t n = 100 + static_cast<std::int64_t>(unif(gen) * 5000);
        double p = 2.0 + unif(gen);
        double kappa = unif(gen);
        double prev_md = 1e300, prev_rio = 1e300, prev_yb = 1e300, prev_wf = 1e300,
               prev_ros = 1e300, prev_fuk = 1e300;
        for (double x = 0.5; x < 200.0; x *= 1.7) {
            double md = moddev_bound(ModDevCase::p_gt_2, n, x, p, 0.0, kappa).total;
            double rio = rio_fn_bound(n, x, p, 2.0 * p, kappa).total;
            double yb = young_bound(p, L, x, kappa).total;
            double wf = weak_fuk_bound(p, x, M, 2.0, kappa).total;
            double ros = rosenthal_bound(p + 1.0, n, x, 0.3, 0.8, 0.9, 0.2, kappa).total;
            double fk = fuk_bound(p, x, 0.0, 0.8, 0.9, rep % 2 == 0).total;
            CHECK(md <= prev_md * (1 + 1e-12));
            CHECK(rio <= prev_rio * (1 + 1e-12));
            CHECK(yb <= prev_yb * (1 + 1e-12));
            CHECK(wf <= prev_wf * (1 + 1e-12));
            CHECK(ros <= prev_ros * (1 + 1e-12));
            CHECK(fk <= prev_fuk * (1 + 1e-12));
            prev_md = md;
            prev_rio = rio;
            prev_yb = yb;
            prev_wf = wf;
            prev_ros = ros;
            prev_fuk = fk;
        }
    }
}

TEST_CASE("bound totals scale linearly in their constant") {
    std::mt19937_64 gen(555);
    std::uniform_real_distribution<double> unif(0.2, 3.0);
    std::vector<double> L{1.0, 0.4, 2.0};
    for (int rep = 0; rep < 100; ++rep) {
        double scale = unif(gen);
        double x = 1.0 + unif(gen);
        std::int64_t n = 50 + static_cast<std::int64_t>(unif(gen) * 1000);
        // pure-polynomial branches are exactly homogeneous in the constant
        CHECK(moddev_bound(ModDevCase::p_lt_2, n, x, 1.5, 0.0, scale).total ==
              doctest::Approx(scale *
                              moddev_bound(ModDevCase::p_lt_2, n, x, 1.5, 0.0, 1.0).total)
                  .epsilon(1e-12));
        CHECK(rio_fn_bound(n, x, 3.0, 5.0, scale).total ==
              doctest::Approx(scale * rio_fn_bound(n, x, 3.0, 5.0, 1.0).total)
                  .epsilon(1e-12));
        CHECK(young_bound(1.5, L, x, scale).total ==
              doctest::Approx(scale * young_bound(1.5, L, x, 1.0).total).epsilon(1e-12));
        CHECK(rosenthal_bound(4.0, n, x, 0.3, 0.8, 0.9, 0.2, scale).total ==
              doctest::Approx(scale *
                              rosenthal_bound(4.0, n, x, 0.3, 0.8, 0.9, 0.2, 1.0).total)
                  .epsilon(1e-12));
    }
}

TEST_CASE("breakdown labels are a frozen contract") {
    CHECK(moddev_bound(ModDevCase::p_gt_2, 10, 1.0, 3.0, 0.0, 1.0).terms[0].label ==
          "poly_tail");
    CHECK(moddev_bound(ModDevCase::p_gt_2, 10, 1.0, 3.0, 0.0, 1.0).terms[1].label ==
          "exp_gaussian");
    CHECK(moddev_bound(ModDevCase::p_eq_2, 10, 1.0, 2.0, 3.0, 1.0).terms[1].label ==
          "anomalous_clt");
    auto rio = rio_fn_bound(10, 1.0, 2.0, 3.0, 1.0);
    CHECK(rio.terms[0].label == "poly_tail");
    CHECK(rio.terms[1].label == "rosenthal_variance");
    CHECK(rio.terms[2].label == "log_correction");
    auto fuk = fuk_bound(2.0, 1.0, 0.1, 0.1, 0.1, false);
    CHECK(fuk.terms[0].label == "excess_prob");
    CHECK(fuk.terms[1].label == "truncated_moment");
    CHECK(fuk.terms[2].label == "exp_variance");
    auto ros = rosenthal_bound(3.0, 10, 1.0, 0.1, 0.1, 0.1, 0.1);
    CHECK(ros.terms[0].label == "coupling_l1");
    CHECK(ros.terms[1].label == "r_moment");
    CHECK(ros.terms[2].label == "variance_r2");
    CHECK(ros.terms[3].label == "delta_correction");
    auto young = young_bound(2.0, {1.0, 1.0}, 1.0, 1.0);
    CHECK(young.terms[0].label == "poly_tail");
    CHECK(young.terms[1].label == "exp_gaussian_log");
    auto freed = freedman_terms(1.0, 1.0, 1.0, 10, 2.0);
    CHECK(freed.terms[0].label == "exp_quadratic");
    CHECK(freed.terms[1].label == "exp_linear");
}
