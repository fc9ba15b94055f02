#include "doctest.h"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/kernels.hpp"
#include "fdlab/series.hpp"

#include <cmath>

using namespace fdlab;

TEST_CASE("cesaro numbers: closed values") {
    for (long n : {0L, 1L, 5L, 100L}) CHECK(cesaro::number(1.0, n) == 1.0);
    CHECK(cesaro::number(2.0, 5) == 6.0);           // k^2(n) = n+1
    CHECK(cesaro::number(-0.5, 1) == -0.5);         // first coefficient of (1-t)^{1/2}
    CHECK(cesaro::number(0.5, 2) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("nonpositive integer orders terminate in the exact binomial pattern") {
    auto c = cesaro::coefficients(-1.0, 4);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -1.0);
    CHECK(c[2] == 0.0);
    CHECK(c[3] == 0.0);
    for (long n = 0; n <= 3; ++n) {
        double expect = ((n % 2) ? -1.0 : 1.0) * ((n == 0)   ? 1.0
                                                  : (n == 1) ? 3.0
                                                  : (n == 2) ? 3.0
                                                             : 1.0);
        CHECK(cesaro::number(-3.0, n) == expect);
    }
    CHECK(cesaro::number(-3.0, 4) == 0.0);
    CHECK(cesaro::number(-3.0, 17) == 0.0);
    CHECK_THROWS_AS(cesaro::number_gamma(-3.0, 4), DomainError);
    CHECK_THROWS_AS(cesaro::number_gamma(0.0, 1), DomainError);
}

TEST_CASE("gamma-ratio path cross-checks the recurrence") {
    for (double a : {0.25, -0.25, 0.5, -0.5, 0.9, 1.5, 2.7}) {
        double rec = 1.0;
        for (long n = 1; n <= 10000; ++n) {
            rec *= (n + a - 1.0) / n;
            if (n % 977 == 0 || n < 4 || n == 10000) {
                double g = cesaro::number_gamma(a, n);
                CHECK(std::fabs(rec - g) <= 1e-12 * std::fabs(g));
            }
        }
    }
}

TEST_CASE("gautschi bounds bracket k^a(n)") {
    auto b = cesaro::gautschi_bounds(1.0, 7);
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(1.0));

    // expected endpoints evaluated through the log-Gamma route
    auto g = cesaro::gautschi_bounds(0.5, 1);
    double gamma_half = std::exp(std::lgamma(0.5));
    CHECK(g.lower == doctest::Approx(std::pow(2.0, -0.5) / gamma_half).epsilon(1e-14));
    CHECK(g.upper == doctest::Approx(1.0 / gamma_half).epsilon(1e-14));
    CHECK(g.lower <= 0.5);
    CHECK(0.5 <= g.upper);

    for (double a : {0.1, 0.5, 0.9, 1.0}) {
        double k = 1.0;
        for (long n = 1; n <= 10000; ++n) {
            k *= (n + a - 1.0) / n;
            if (n % 389 == 0 || n < 8 || n == 10000) {
                auto bb = cesaro::gautschi_bounds(a, n);
                CHECK(bb.lower <= k * (1 + 1e-14));
                CHECK(k <= bb.upper * (1 + 1e-14));
            }
        }
    }
    CHECK_THROWS_AS(cesaro::gautschi_bounds(1.5, 3), DomainError);
    CHECK_THROWS_AS(cesaro::gautschi_bounds(0.5, 0), DomainError);
}

TEST_CASE("vandermonde convolution of coefficient sequences") {
    const std::size_t N = 201;
    for (double a : {-0.5, 0.4, 1.3}) {
        for (double b : {0.7, 2.0}) {
            auto ka = cesaro::coefficients(a, N);
            auto kb = cesaro::coefficients(b, N);
            auto kab = cesaro::coefficients(a + b, N);
            std::vector<double> conv(N);
            kernels::conv_prefix(ka, kb, conv);
            for (std::size_t n = 0; n < N; ++n)
                CHECK(std::fabs(conv[n] - kab[n]) <=
                      1e-10 * std::max(1.0, std::fabs(kab[n])));
        }
    }
}

TEST_CASE("sign pattern of k^{-a} for 0 < a < 1") {
    for (double a : {0.3, 0.5, 0.77}) {
        auto c = cesaro::coefficients(-a, 500);
        CHECK(c[0] == 1.0);
        for (std::size_t n = 1; n < c.size(); ++n) CHECK(c[n] < 0.0);
    }
}

TEST_CASE("fitted tail model stays valid past the stored head") {
    for (double a : {0.5, -0.6, 1.7}) {
        auto seq = cesaro::sequence({a, 2000});
        REQUIRE(seq.tail().has_value());
        CHECK(seq.tail()->exponent == doctest::Approx(a - 1.0));
        double k = seq.coeffs().back();
        for (long n = 2000; n <= 8000; ++n) {
            k *= (n + a - 1.0) / n;
            CHECK(std::fabs(k) <= seq.tail()->constant * std::pow(double(n), a - 1.0));
        }
    }
}

TEST_CASE("coefficient series basics") {
    series::CoefficientSeries f({2.0, -1.0, 0.5});
    CHECK(f.l1_head() == doctest::Approx(3.5));
    CHECK(f.coeff(7) == 0.0);
    CHECK(f.eval(1.0) == doctest::Approx(1.5));
    auto t = f.truncated(1);
    CHECK(t.size() == 2);
    auto p = f.product(f, 5);
    CHECK(p.coeff(0) == doctest::Approx(4.0));
    CHECK(p.coeff(1) == doctest::Approx(-4.0));
    CHECK(p.coeff(2) == doctest::Approx(3.0));
    CHECK(series::strictly_positive_head(series::CoefficientSeries({1.0, 0.0, 0.25})));
    CHECK_FALSE(series::strictly_positive_head(f));
    CHECK(series::coefficientwise_geq(series::CoefficientSeries({1.0, 1.0}),
                                      series::CoefficientSeries({1.0, 0.5}), 4));
    auto g = series::CoefficientSeries::geometric_kernel(0.5, 2, 6);
    for (std::size_t n = 0; n < 6; ++n)
        CHECK(g.coeff(n) ==
              doctest::Approx(std::pow(0.5, double(n)) * (n + 1.0)).epsilon(1e-14));
}
