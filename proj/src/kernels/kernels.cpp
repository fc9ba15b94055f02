#include "fdlab/kernels.hpp"
#include "fdlab/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace fdlab::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

// Neumaier two-sum step: adds p into (s, c).
inline void two_sum(double& s, double& c, double p) {
    double t = s + p;
    if (std::fabs(s) >= std::fabs(p))
        c += (s - t) + p;
    else
        c += (p - t) + s;
    s = t;
}

double dot_compensated_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0, c = 0;
    for (std::size_t i = 0; i < n; ++i) two_sum(s, c, x[i] * y[i]);
    return s + c;
}

double sum_compensated_scalar(const double* x, std::size_t n) {
    double s = 0, c = 0;
    for (std::size_t i = 0; i < n; ++i) two_sum(s, c, x[i]);
    return s + c;
}

} // namespace

const Backend& scalar_backend() {
    static const Backend b{"scalar", dot_scalar, dot_compensated_scalar, sum_compensated_scalar};
    return b;
}

#if defined(__x86_64__) || defined(_M_X64)
const Backend* avx2_backend_if_supported(); // kernels_avx2.cpp
#endif
#if defined(__aarch64__)
const Backend* neon_backend(); // kernels_neon.cpp
#endif

namespace {

std::vector<const Backend*> build_backend_list() {
    std::vector<const Backend*> v;
    v.push_back(&scalar_backend());
#if defined(__x86_64__) || defined(_M_X64)
    if (const Backend* b = avx2_backend_if_supported()) v.push_back(b);
#endif
#if defined(__aarch64__)
    v.push_back(neon_backend());
#endif
    return v;
}

const std::vector<const Backend*>& backend_list() {
    static const std::vector<const Backend*> v = build_backend_list();
    return v;
}

const Backend* pick_default() {
    const auto& v = backend_list();
    if (const char* env = std::getenv("FDLAB_KERNEL_BACKEND")) {
        for (const Backend* b : v)
            if (std::string_view(b->name) == env) return b;
    }
    return v.back(); // fastest available
}

const Backend*& active_slot() {
    static const Backend* b = pick_default();
    return b;
}

} // namespace

std::span<const Backend* const> available_backends() {
    const auto& v = backend_list();
    return {v.data(), v.size()};
}

const Backend& active() { return *active_slot(); }

void force(std::string_view name) {
    for (const Backend* b : backend_list()) {
        if (name == b->name) {
            active_slot() = b;
            return;
        }
    }
    throw DomainError("kernels::force: unknown or unavailable backend '" + std::string(name) + "'");
}

void conv_prefix(std::span<const double> f, std::span<const double> g, std::span<double> out) {
    const std::size_t n = out.size();
    if (n == 0) return;
    // Reverse g once so each output is a contiguous dot product.
    std::vector<double> grev(n);
    for (std::size_t i = 0; i < n; ++i) grev[i] = g[n - 1 - i];
    const Backend& b = active();
    for (std::size_t m = 0; m < n; ++m)
        out[m] = b.dot(f.data(), grev.data() + (n - 1 - m), m + 1);
}

} // namespace fdlab::kernels
