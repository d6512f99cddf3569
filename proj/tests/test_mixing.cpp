#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymix/mixing.hpp"

using namespace polymix;

namespace {
const RenewalLaw& renewalLaw_p3() {
    static RenewalLaw law = renewal_law(3.0, 1'000'000);
    return law;
}

FiniteKernel small_dense() {
    // doubly stochastic 3-state chain, uniform stationary law
    std::vector<std::vector<double>> rows{
        {0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}};
    std::vector<double> pi{1.0 / 3, 1.0 / 3, 1.0 / 3};
    return FiniteKernel::dense(rows, pi);
}
} // namespace

TEST_CASE("dense kernel validation") {
    CHECK_THROWS_AS(FiniteKernel::dense({{0.5, 0.4}, {0.5, 0.5}}, {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FiniteKernel::dense({{0.9, 0.1}, {0.5, 0.5}}, {0.5, 0.5}),
                    std::invalid_argument); // pi not stationary
}

TEST_CASE("exact iterate semigroup") {
    FiniteKernel k = small_dense();
    std::vector<double> f{1.0, -0.4, 2.2};
    CHECK(exact_iterate(k, f, 0) == f);
    CHECK_THROWS_AS(exact_iterate(k, f, -1), std::domain_error);
    auto lhs = exact_iterate(k, f, 7);
    auto rhs = exact_iterate(k, exact_iterate(k, f, 3), 4);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
}

TEST_CASE("constant observables have zero mixing coefficient") {
    FiniteKernel k = small_dense();
    std::vector<double> c{0.7, 0.7, 0.7};
    auto g = exact_iterate(k, c, 9);
    CHECK(pi_l1_deviation(k, g, 0.7) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("renewal one-step kernel matches the jump law") {
    RenewalLaw law = renewal_law(3.0, 100'000);
    FiniteKernel k = FiniteKernel::renewal(law, 2000);
    std::vector<double> f(2000);
    for (std::size_t s = 0; s < f.size(); ++s)
        f[s] = std::cos(static_cast<double>(s)); // arbitrary bounded observable
    auto g = k.apply(f);
    double direct = 0.0;
    for (std::size_t j = 1; j < 2000; ++j) direct += law.jump_pmf[j - 1] * f[j];
    CHECK(g[0] == doctest::Approx(direct).epsilon(1e-14));
    CHECK(g[5] == f[4]);
    CHECK(k.discretization_error > 0.0);
    CHECK(k.discretization_error < 1e-9);
}

TEST_CASE("renewal mixing curve: closed recursion against kernel iteration") {
    RenewalLaw law = renewalLaw_p3();
    MixingCurve curve = renewal_h1_curve(law, 60);

    FiniteKernel k = FiniteKernel::renewal(law, 3000);
    Observable obs = renewal_indicator_observable(law);
    std::vector<double> f(3000);
    for (std::size_t s = 0; s < f.size(); ++s)
        f[s] = observable_value(obs, static_cast<double>(s));
    std::vector<double> g = f;
    for (std::int64_t n = 1; n <= 60; ++n) {
        g = k.apply(g);
        double coeff = pi_l1_deviation(k, g, 0.0);
        CHECK(curve.entries[static_cast<std::size_t>(n - 1)].coeff ==
              doctest::Approx(coeff).epsilon(1e-6));
    }
}

TEST_CASE("renewal mixing curve is positive with a nonincreasing envelope") {
    RenewalLaw law = renewalLaw_p3();
    MixingCurve curve = renewal_h1_curve(law, 500);
    for (const auto& e : curve.entries) CHECK(e.coeff > 0.0);
    double prev_window = 1e300;
    for (std::int64_t lo = 10; lo + 50 <= 500; lo += 50) {
        double mx = 0.0;
        for (std::int64_t n = lo; n < lo + 50; ++n)
            mx = std::max(mx, curve.entries[static_cast<std::size_t>(n - 1)].coeff);
        CHECK(mx <= prev_window * (1 + 1e-12));
        prev_window = mx;
    }
}

TEST_CASE("doubling closed forms") {
    // K f for f(x) = x is x/2 + 1/4
    AffineFn g = doubling_iterate_affine({1.0, 0.0}, 1);
    CHECK(g.a == doctest::Approx(0.5));
    CHECK(g.b == doctest::Approx(0.25));

    // dual route: dyadic-sum evaluation at sample points
    for (std::int64_t n : {1, 2, 5, 10}) {
        AffineFn gn = doubling_iterate_affine({1.0, 0.0}, n);
        for (double x : {0.0, 0.3, 0.9}) {
            double direct =
                doubling_iterate_value([](double u) { return u; }, n, x);
            CHECK(direct == doctest::Approx(gn.a * x + gn.b).epsilon(1e-12));
        }
    }

    // h1 coefficient 2^-(n+2), exact
    for (std::int64_t n = 1; n <= 20; ++n)
        CHECK(doubling_h1_affine({1.0, 0.0}, n) ==
              doctest::Approx(std::pow(2.0, -static_cast<double>(n + 2))).epsilon(1e-12));
}

TEST_CASE("h1_coefficient is invariant under recentering f") {
    ChainModel doubling = DoublingChain{};
    MixingEntry a = h1_coefficient(doubling, identity_observable(0.5), 6);
    MixingEntry b = h1_coefficient(doubling, identity_observable(0.0), 6);
    CHECK(a.coeff == doctest::Approx(b.coeff).epsilon(1e-14));
    CHECK(a.coeff == doctest::Approx(std::pow(2.0, -8.0)).epsilon(1e-12));
}

TEST_CASE("monte-carlo mixing coefficient agrees with the doubling closed form") {
    ChainModel doubling = DoublingChain{};
    MixingEntry mc =
        h1_coefficient_mc(doubling, identity_observable(0.5), 3, 400, 2000, 20250808);
    double exact = std::pow(2.0, -5.0);
    CHECK(mc.method == "mc");
    CHECK(std::fabs(mc.coeff - exact) < 4.0 * mc.stderr_coeff + 0.25 * exact);
    CHECK_THROWS_AS(
        h1_coefficient_mc(doubling, identity_observable(0.5), 3, 9, 10, 1),
        std::invalid_argument);
}

TEST_CASE("harris mixing curve sits under the beta-mixing envelope") {
    HarrisParams h = harris_params(2.0, 1.0);
    std::vector<std::int64_t> ns;
    for (std::int64_t n = 4; n <= 200; n += 7) ns.push_back(n);
    MixingCurve curve = harris_h1_curve(h, ns, 2048);
    CHECK(curve.discretization_error < 1e-3);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double env = harris_beta_envelope(h, ns[i]);
        CHECK(curve.entries[i].coeff <= env + curve.discretization_error + 1e-9);
    }
}

TEST_CASE("rate fit on synthetic and exact curves") {
    MixingCurve synth;
    for (std::int64_t n = 10; n <= 200; ++n)
        synth.entries.push_back({n, 7.0 * std::pow(static_cast<double>(n), -2.0), 0.0, "exact"});
    RateFitResult fit = rate_fit(synth, 10, 200);
    CHECK(fit.fit.slope == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(fit.fit.stderr_slope < 1e-9);
    CHECK(fit.flag.empty());

    // zero entries are excluded and reported
    synth.entries[5].coeff = 0.0;
    RateFitResult fit2 = rate_fit(synth, 10, 200);
    CHECK(fit2.excluded.size() == 1);
    CHECK(fit2.excluded[0] == 15);

    // superpolynomial decay is flagged
    MixingCurve dbl;
    for (std::int64_t n = 1; n <= 20; ++n)
        dbl.entries.push_back({n, std::pow(2.0, -static_cast<double>(n + 2)), 0.0, "exact"});
    RateFitResult fit3 = rate_fit(dbl, 1, 20);
    CHECK(fit3.flag == "faster_than_polynomial");

    CHECK_THROWS_AS(rate_fit(synth, 1, 5), std::invalid_argument);
}

TEST_CASE("renewal exact curve reaches the H1 exponent after its transient") {
    // q_1 = 1/zeta(4) = 0.924 makes the chain nearly 2-periodic, so the
    // coefficient drops along a fast parity transient before settling onto
    // the n^{-(p-1)} tail around n ~ 200. The asymptotic window carries the
    // H1 exponent; the early window is steeper.
    RenewalLaw law = renewalLaw_p3();
    MixingCurve curve = renewal_h1_curve(law, 500);
    RateFitResult tail_fit = rate_fit(curve, 200, 500);
    CHECK(tail_fit.fit.slope == doctest::Approx(-2.0).epsilon(0.125)); // within +-0.25
    RateFitResult early_fit = rate_fit(curve, 50, 500);
    CHECK(early_fit.fit.slope < -2.25); // transient-dominated, steeper than H1
    // n^2 coeff approaches a constant: direct evidence of the n^-2 tail
    double c200 = 200.0 * 200.0 * curve.entries[199].coeff;
    double c500 = 500.0 * 500.0 * curve.entries[499].coeff;
    CHECK(c500 == doctest::Approx(c200).epsilon(0.10));
}

TEST_CASE("stderr weighting downweights noisy curve entries") {
    MixingCurve mixed;
    for (std::int64_t n = 10; n <= 100; n += 5) {
        double coeff = 5.0 * std::pow(static_cast<double>(n), -2.0);
        mixed.entries.push_back({n, coeff, 0.0, "exact"});
    }
    // one wildly off MC entry with a large stderr
    mixed.entries.push_back({120, 50.0 * std::pow(120.0, -2.0), 1.0, "mc"});
    RateFitResult plain = rate_fit(mixed, 10, 120, false);
    RateFitResult weighted = rate_fit(mixed, 10, 120, true);
    CHECK(std::fabs(weighted.fit.slope + 2.0) < 1e-6);
    CHECK(std::fabs(plain.fit.slope + 2.0) > 0.05);
}

TEST_CASE("quadrature inequality and oracle") {
    // B(b+1, k+1) <= k^-(b+1) Gamma(b+1) on the full acceptance grid
    for (double b : {0.5, 1.0, 2.0, 3.5})
        for (int k = 1; k <= 100; ++k) {
            double lhs = one_minus_x_pow_moment(b, static_cast<double>(k));
            double rhs = quadrature_majorant(b, static_cast<double>(k));
            CHECK(lhs <= rhs * (1 + 1e-12));
        }
    // the closed form really is the integral: quadrature spot checks
    for (double b : {0.5, 2.0})
        for (double k : {1.0, 7.0, 40.0}) {
            double quad = adaptive_simpson(
                [&](double x) { return std::pow(1.0 - x, k) * std::pow(x, b); }, 0.0, 1.0,
                1e-13);
            CHECK(one_minus_x_pow_moment(b, k) == doctest::Approx(quad).epsilon(1e-9));
        }
}
