// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma on x86-64 only; entry is gated by a runtime CPU probe.

#if defined(__x86_64__) || defined(_M_X64)

#include "fdlab/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace fdlab::kernels {

namespace {

double reduce_add(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sw = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sw));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), a3);
    }
    for (; i + 4 <= n; i += 4)
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    double s = reduce_add(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

inline void two_sum_scalar(double& s, double& c, double p) {
    double t = s + p;
    if (std::fabs(s) >= std::fabs(p))
        c += (s - t) + p;
    else
        c += (p - t) + s;
    s = t;
}

// Lane-wise Neumaier accumulation: each of the four lanes carries its own
// (sum, compensation) pair; lanes are merged with scalar two-sums at the end.
inline void two_sum_lanes(__m256d& s, __m256d& c, __m256d p) {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d t = _mm256_add_pd(s, p);
    __m256d as = _mm256_and_pd(s, absmask);
    __m256d ap = _mm256_and_pd(p, absmask);
    __m256d big_s = _mm256_cmp_pd(as, ap, _CMP_GE_OQ);
    __m256d e_s = _mm256_add_pd(_mm256_sub_pd(s, t), p); // |s| >= |p|
    __m256d e_p = _mm256_add_pd(_mm256_sub_pd(p, t), s); // |p| >  |s|
    c = _mm256_add_pd(c, _mm256_blendv_pd(e_p, e_s, big_s));
    s = t;
}

double dot_compensated_avx2(const double* x, const double* y, std::size_t n) {
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        two_sum_lanes(s, c, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    alignas(32) double sl[4], cl[4];
    _mm256_store_pd(sl, s);
    _mm256_store_pd(cl, c);
    double acc = 0, comp = 0;
    for (int k = 0; k < 4; ++k) {
        two_sum_scalar(acc, comp, sl[k]);
        comp += cl[k];
    }
    for (; i < n; ++i) two_sum_scalar(acc, comp, x[i] * y[i]);
    return acc + comp;
}

double sum_compensated_avx2(const double* x, std::size_t n) {
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) two_sum_lanes(s, c, _mm256_loadu_pd(x + i));
    alignas(32) double sl[4], cl[4];
    _mm256_store_pd(sl, s);
    _mm256_store_pd(cl, c);
    double acc = 0, comp = 0;
    for (int k = 0; k < 4; ++k) {
        two_sum_scalar(acc, comp, sl[k]);
        comp += cl[k];
    }
    for (; i < n; ++i) two_sum_scalar(acc, comp, x[i]);
    return acc + comp;
}

const Backend avx2_backend{"avx2", dot_avx2, dot_compensated_avx2, sum_compensated_avx2};

} // namespace

const Backend* avx2_backend_if_supported() {
#if defined(__GNUC__) || defined(__clang__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_backend;
#endif
    return nullptr;
}

} // namespace fdlab::kernels

#endif // x86-64
