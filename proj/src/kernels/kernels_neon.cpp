// NEON kernel variants (aarch64). Structure mirrors the AVX2 file with
// two-wide double lanes.

#if defined(__aarch64__)

#include "fdlab/kernels.hpp"

#include <arm_neon.h>
#include <cmath>

namespace fdlab::kernels {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
        a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double s = vaddvq_f64(a0) + vaddvq_f64(a1);
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

inline void two_sum_lanes(float64x2_t& s, float64x2_t& c, float64x2_t p) {
    float64x2_t t = vaddq_f64(s, p);
    uint64x2_t big_s = vcgeq_f64(vabsq_f64(s), vabsq_f64(p));
    float64x2_t e_s = vaddq_f64(vsubq_f64(s, t), p);
    float64x2_t e_p = vaddq_f64(vsubq_f64(p, t), s);
    c = vaddq_f64(c, vbslq_f64(big_s, e_s, e_p));
    s = t;
}

double dot_compensated_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t s = vdupq_n_f64(0.0);
    float64x2_t c = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        two_sum_lanes(s, c, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    double acc = 0, comp = 0;
    two_sum_scalar(acc, comp, vgetq_lane_f64(s, 0));
    two_sum_scalar(acc, comp, vgetq_lane_f64(s, 1));
    comp += vgetq_lane_f64(c, 0) + vgetq_lane_f64(c, 1);
    for (; i < n; ++i) two_sum_scalar(acc, comp, x[i] * y[i]);
    return acc + comp;
}

double sum_compensated_neon(const double* x, std::size_t n) {
    float64x2_t s = vdupq_n_f64(0.0);
    float64x2_t c = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) two_sum_lanes(s, c, vld1q_f64(x + i));
    double acc = 0, comp = 0;
    two_sum_scalar(acc, comp, vgetq_lane_f64(s, 0));
    two_sum_scalar(acc, comp, vgetq_lane_f64(s, 1));
    comp += vgetq_lane_f64(c, 0) + vgetq_lane_f64(c, 1);
    for (; i < n; ++i) two_sum_scalar(acc, comp, x[i]);
    return acc + comp;
}

const Backend neon_backend_v{"neon", dot_neon, dot_compensated_neon, sum_compensated_neon};

} // namespace

const Backend* neon_backend() { return &neon_backend_v; }

} // namespace fdlab::kernels

#endif // aarch64
