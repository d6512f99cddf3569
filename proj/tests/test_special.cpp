#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polymix/special.hpp"

using namespace polymix;

TEST_CASE("zeta matches closed forms") {
    const double pi = 3.14159265358979323846;
    CHECK(zeta(2.0, 1e-10) == doctest::Approx(pi * pi / 6.0).epsilon(1e-10));
    CHECK(zeta(4.0, 1e-10) == doctest::Approx(pi * pi * pi * pi / 90.0).epsilon(1e-10));
    CHECK(zeta(6.0, 1e-12) ==
          doctest::Approx(std::pow(pi, 6) / 945.0).epsilon(1e-12));
}

TEST_CASE("zeta rejects the boundary") {
    CHECK_THROWS_AS(zeta(1.0), std::domain_error);
    CHECK_THROWS_AS(zeta(0.5), std::domain_error);
    CHECK_THROWS_AS(zeta(2.0, -1.0), std::domain_error);
}

TEST_CASE("zeta against brute-force partial sums") {
    // slow independent route: direct summation with a crude remainder window
    for (double s : {1.5, 2.5, 3.0, 4.5}) {
        double direct = 0.0;
        const long N = 2'000'000;
        for (long n = N; n >= 1; --n) direct += std::pow(static_cast<double>(n), -s);
        double remainder_hi = std::pow(static_cast<double>(N), 1.0 - s) / (s - 1.0);
        double z = zeta(s, 1e-12);
        CHECK(z >= direct * (1.0 - 1e-14));
        CHECK(z <= direct + remainder_hi * 1.0000001);
    }
}

TEST_CASE("power tail sums agree with zeta differences") {
    for (double s : {1.7, 2.0, 3.0, 4.0}) {
        for (std::uint64_t m : {1ULL, 2ULL, 5ULL, 17ULL}) {
            double head = 0.0;
            for (std::uint64_t j = 1; j < m; ++j) head += std::pow(static_cast<double>(j), -s);
            CHECK(power_tail_sum(s, m) ==
                  doctest::Approx(zeta(s, 1e-14) - head).epsilon(1e-12));
        }
    }
}

TEST_CASE("beta function vs quadrature oracle") {
    for (double a : {0.5, 1.0, 2.5}) {
        for (double b : {1.0, 3.0, 7.5}) {
            // substitution x = sin^2 t removes the endpoint singularities
            double quad = adaptive_simpson(
                [&](double t) {
                    double s_ = std::sin(t), c_ = std::cos(t);
                    return 2.0 * std::pow(s_, 2.0 * a - 1.0) * std::pow(c_, 2.0 * b - 1.0);
                },
                0.0, 1.5707963267948966, 1e-13);
            CHECK(beta_fn(a, b) == doctest::Approx(quad).epsilon(1e-9));
        }
    }
}

TEST_CASE("normal cdf endpoints") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(norm_cdf(-8.0) < 1e-14);
}

TEST_CASE("chi-square quantile sanity") {
    // monotone in probability and dof; matches the classical 0.999/10 value
    CHECK(chi2_quantile(0.999, 10.0) == doctest::Approx(29.588).epsilon(0.02));
    CHECK(chi2_quantile(0.95, 10.0) < chi2_quantile(0.999, 10.0));
    CHECK(chi2_quantile(0.999, 10.0) < chi2_quantile(0.999, 20.0));
}
