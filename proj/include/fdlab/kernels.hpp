#ifndef FDLAB_KERNELS_HPP
#define FDLAB_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops shared by the series evaluators: plain and
// compensated dot products, compensated sums, and prefix convolutions.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is selected at runtime when the CPU supports it (NEON on aarch64).
// The variants are equivalence-tested against the scalar kernels.

namespace fdlab::kernels {

struct Backend {
    const char* name;
    double (*dot)(const double*, const double*, std::size_t);
    double (*dot_compensated)(const double*, const double*, std::size_t);
    double (*sum_compensated)(const double*, std::size_t);
};

const Backend& scalar_backend();

// Backends compiled into this binary (scalar always, SIMD when available
// on the target architecture).
std::span<const Backend* const> available_backends();

// Active backend. Chosen once per process: SIMD if the CPU supports it,
// unless the environment variable FDLAB_KERNEL_BACKEND names another one.
const Backend& active();

// Overrides the active backend (tests). Throws DomainError for an unknown
// or unsupported name.
void force(std::string_view name);

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

// Products accumulated in ascending index order with Neumaier compensation;
// the summation error stays O(eps) even under heavy cancellation.
inline double dot_compensated(std::span<const double> x, std::span<const double> y) {
    return active().dot_compensated(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double sum_compensated(std::span<const double> x) {
    return active().sum_compensated(x.data(), x.size());
}

// out[m] = sum_{j<=m} f[j] * g[m-j] for m < out.size().
// f and g must both have at least out.size() entries.
void conv_prefix(std::span<const double> f, std::span<const double> g, std::span<double> out);

} // namespace fdlab::kernels

#endif
