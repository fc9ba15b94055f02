#include "doctest.h"

#include "fdlab/cesaro.hpp"
#include "fdlab/errors.hpp"
#include "fdlab/fracdiff.hpp"
#include "fdlab/shifts.hpp"

#include <cmath>

using namespace fdlab;
using shifts::Direction;
using shifts::ShiftSpec;
using shifts::Verdict;

namespace {

const ShiftSpec B(double s) { return {Direction::backward, s}; }
const ShiftSpec F(double s) { return {Direction::forward, s}; }

// brute-force streaming oracle for sum_j k^{-a}(j) k^s(j+m)
double series_oracle(double a, double s, long m, long terms) {
    double kma = 1.0, ks = cesaro::number(s, m);
    double acc = 0.0, c = 0.0;
    for (long j = 0; j < terms; ++j) {
        double t = kma * ks;
        double u = acc + t;
        if (std::fabs(acc) >= std::fabs(t))
            c += (acc - u) + t;
        else
            c += (t - u) + acc;
        acc = u;
        kma *= (j - a) / (j + 1.0);
        ks *= (j + m + s) / (j + m + 1.0);
    }
    return acc + c;
}

} // namespace

TEST_CASE("power norms of the basis vectors") {
    for (long n : {0L, 1L, 3L}) CHECK(shifts::power_norm_sq(B(1.0), n, 5) == 1.0);
    for (long n : {0L, 1L, 4L})
        CHECK(shifts::power_norm_sq(F(2.0), n, 0) == doctest::Approx(n + 1.0));
    CHECK(shifts::power_norm_sq(F(0.5), 2, 1) == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(shifts::power_norm_sq(B(0.7), 4, 3) == 0.0); // annihilated
}

TEST_CASE("operator norm estimates track the growth exponents") {
    CHECK(shifts::operator_norm_sq_estimate(B(1.0), 7) == 1.0);
    CHECK(shifts::operator_norm_sq_estimate(F(2.0), 7) == doctest::Approx(8.0));
    for (long n : {1L, 16L, 256L, 4096L, 10000L}) {
        double v = shifts::operator_norm_sq_estimate(B(0.5), n);
        double ratio = v / std::pow(n + 1.0, 0.5);
        CHECK(ratio > 0.4);
        CHECK(ratio < 2.5);
    }
}

TEST_CASE("closed form for the fractional difference of coefficient sequences") {
    CHECK(shifts::frac_diff_cesaro_closed(1.5, 2.0, 0) == 0.0);
    // brute-force oracle with a certified-scale term count
    double v = shifts::frac_diff_cesaro_closed(0.5, 0.5, 0);
    CHECK(v == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK(std::fabs(series_oracle(0.5, 0.5, 0, 20'000'000) - v) <= 1e-7);
    CHECK_THROWS_AS(shifts::frac_diff_cesaro_closed(1.0, 2.5, 0), DomainError);
}

TEST_CASE("integer-order reduction of the closed form") {
    for (int a : {1, 2, 3}) {
        for (double s : {0.3, 0.8, 1.4, 2.7, 3.6}) {
            if (!(s < a + 1.0)) continue;
            for (long m : {0L, 1L, 4L, 9L}) {
                double lhs = shifts::frac_diff_cesaro_closed(a, s, m);
                double rhs = ((a % 2) ? -1.0 : 1.0) * cesaro::number(s - a, m + a);
                CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(rhs)));
            }
        }
    }
}

TEST_CASE("membership of shifts in the order-a difference class") {
    CHECK(shifts::membership_weak(B(0.3), 2.5));
    CHECK_FALSE(shifts::membership_weak(F(3.0), 1.5));
    CHECK(shifts::membership_weak(F(3.0), 2.0)); // integer order
    CHECK(shifts::membership_weak(F(1.2), 0.5));
}

TEST_CASE("sign classification of weighted shifts") {
    CHECK(shifts::classify(B(0.7), 0.5).verdict == Verdict::nonneg);
    CHECK(shifts::classify(F(2.5), 1.8).verdict == Verdict::nonneg);
    CHECK(shifts::classify(F(1.5), 1.2).verdict == Verdict::nonpos);
    CHECK(shifts::classify(F(3.0), 1.5).verdict == Verdict::not_in_class);
    CHECK(shifts::classify(F(2.0), 1.7).verdict == Verdict::zero);
    CHECK(shifts::classify(B(0.6), 1.1).verdict == Verdict::indefinite);
}

TEST_CASE("parity of the weight interval matches the closed-form sign") {
    struct P {
        double a, s;
    };
    for (P p : {P{0.9, 0.4}, P{1.6, 2.3}, P{2.2, 1.4}, P{3.1, 2.6}, P{2.8, 3.5}}) {
        auto cls = shifts::classify(F(p.s), p.a);
        REQUIRE((cls.verdict == Verdict::nonneg || cls.verdict == Verdict::nonpos));
        double sign = cls.verdict == Verdict::nonneg ? 1.0 : -1.0;
        for (long m = 0; m <= 20; ++m) {
            double v = shifts::frac_diff_cesaro_closed(p.a, p.s, m);
            CHECK(sign * v >= 0.0);
        }
    }
}

TEST_CASE("truncations in the orthonormalized basis") {
    auto b1 = shifts::truncate(B(1.0), 3).matrix();
    CHECK(b1(0, 1).real() == doctest::Approx(1.0));
    CHECK(b1(1, 2).real() == doctest::Approx(1.0));
    CHECK(std::abs(b1(1, 0)) == 0.0);

    auto f2 = shifts::truncate(F(2.0), 2).matrix();
    CHECK(std::abs(f2(1, 0)) == doctest::Approx(std::sqrt(2.0)));

    auto T = shifts::truncate(B(0.5), 4);
    Eigen::VectorXcd e3 = Eigen::VectorXcd::Unit(4, 3);
    for (int n = 0; n <= 3; ++n) {
        double direct = (T.power(n) * e3).squaredNorm();
        CHECK(direct == doctest::Approx(shifts::power_norm_sq(B(0.5), n, 3)).epsilon(1e-13));
    }
    CHECK(T.nilpotent_index().has_value());
    CHECK(*T.nilpotent_index() == 4);
}

TEST_CASE("backward shifts drop out of higher contraction classes") {
    // 0 < b < s < a: order b keeps the positivity, order a breaks it
    double b = 0.4, s = 0.6, a = 1.1;
    CHECK(shifts::classify(B(s), b).verdict == Verdict::nonneg);
    bool negative_found = false;
    for (long m = 1; m <= 30 && !negative_found; ++m) {
        auto seq = shifts::power_norm_sequence(B(s), m);
        for (long n = 0; n <= m && !negative_found; ++n)
            if (fracdiff::frac_diff(a, seq, n).value < -1e-12) negative_found = true;
    }
    CHECK(negative_found);
}

TEST_CASE("an order below min(s,1-s) keeps positivity while the norm series diverges") {
    const double s = 0.3, a = 0.1;
    CHECK(shifts::classify(B(s), a).verdict == Verdict::nonneg);
    // partial sums of sum |k^{-a}(n)| ||B_s^n||^2 keep climbing
    double acc = 0.0, s1e3 = 0.0, kma = 1.0, ks = 1.0;
    for (long n = 0; n <= 100000; ++n) {
        acc += std::fabs(kma) / ks; // ||B_s^n||^2 = 1/k^s(n)
        if (n == 1000) s1e3 = acc;
        kma *= (n - a) / (n + 1.0);
        ks *= (n + s) / (n + 1.0);
    }
    CHECK(acc > 10.0 * s1e3);
}
