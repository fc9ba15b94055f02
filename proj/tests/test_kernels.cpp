#include "doctest.h"

#include "fdlab/errors.hpp"
#include "fdlab/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace fdlab;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale_spread) {
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> ed(-static_cast<int>(scale_spread),
                                          static_cast<int>(scale_spread));
    std::vector<double> v(n);
    for (auto& x : v) x = std::ldexp(nd(rng), ed(rng));
    return v;
}

// long-double reference dot
long double dot_ref(const std::vector<double>& x, const std::vector<double>& y) {
    long double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += static_cast<long double>(x[i]) * static_cast<long double>(y[i]);
    return s;
}

struct BackendGuard {
    std::string saved;
    BackendGuard() : saved(kernels::active().name) {}
    ~BackendGuard() { kernels::force(saved); }
};

} // namespace

TEST_CASE("backend registry lists scalar and rejects unknown names") {
    bool has_scalar = false;
    for (const auto* b : kernels::available_backends())
        if (std::string_view(b->name) == "scalar") has_scalar = true;
    CHECK(has_scalar);
    CHECK_THROWS_AS(kernels::force("not-a-backend"), DomainError);
}

TEST_CASE("simd variants match the scalar reference kernels") {
    BackendGuard guard;
    std::mt19937_64 rng(2024);
    for (std::size_t n : {0u, 1u, 3u, 7u, 17u, 64u, 1000u, 10007u}) {
        auto x = random_vec(rng, n, 8);
        auto y = random_vec(rng, n, 8);
        const auto& ref = kernels::scalar_backend();
        double d_ref = ref.dot(x.data(), y.data(), n);
        double dc_ref = ref.dot_compensated(x.data(), y.data(), n);
        double sc_ref = ref.sum_compensated(x.data(), n);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::fabs(x[i] * y[i]);
        scale = std::max(scale, 1e-30);
        for (const auto* b : kernels::available_backends()) {
            kernels::force(b->name);
            CHECK(std::fabs(kernels::dot(x, y) - d_ref) <= 1e-13 * scale);
            CHECK(std::fabs(kernels::dot_compensated(x, y) - dc_ref) <= 1e-15 * scale);
            double ssc = 0.0;
            for (std::size_t i = 0; i < n; ++i) ssc += std::fabs(x[i]);
            CHECK(std::fabs(kernels::sum_compensated(x) - sc_ref) <=
                  1e-15 * std::max(ssc, 1e-30));
        }
    }
}

TEST_CASE("compensated dot survives heavy cancellation") {
    BackendGuard guard;
    // sum is exactly 1 but the running partial sums reach 1e16
    std::vector<double> x = {1e16, 3.0, -1e16, -2.0};
    std::vector<double> y = {1.0, 1.0, 1.0, 1.0};
    for (const auto* b : kernels::available_backends()) {
        kernels::force(b->name);
        CHECK(kernels::dot_compensated(x, y) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("compensated kernels track a long-double reference on long inputs") {
    BackendGuard guard;
    std::mt19937_64 rng(99);
    auto x = random_vec(rng, 200000, 20);
    auto y = random_vec(rng, 200000, 20);
    long double ref = dot_ref(x, y);
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) scale += std::fabs(x[i] * y[i]);
    for (const auto* b : kernels::available_backends()) {
        kernels::force(b->name);
        double got = kernels::dot_compensated(x, y);
        CHECK(std::fabs(static_cast<long double>(got) - ref) <= 1e-16L * scale);
    }
}

TEST_CASE("prefix convolution matches the naive double loop") {
    BackendGuard guard;
    std::mt19937_64 rng(7);
    auto f = random_vec(rng, 257, 2);
    auto g = random_vec(rng, 257, 2);
    std::vector<double> naive(257, 0.0);
    for (std::size_t m = 0; m < naive.size(); ++m)
        for (std::size_t j = 0; j <= m; ++j) naive[m] += f[j] * g[m - j];
    for (const auto* b : kernels::available_backends()) {
        kernels::force(b->name);
        std::vector<double> out(257);
        kernels::conv_prefix(f, g, out);
        for (std::size_t m = 0; m < out.size(); ++m)
            CHECK(out[m] == doctest::Approx(naive[m]).epsilon(1e-11));
    }
}
