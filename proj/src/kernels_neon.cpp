#include "sgur/kernels.hpp"

#if defined(SGUR_BUILD_NEON) && defined(__aarch64__)

#include <arm_neon.h>
#include <cmath>

// NEON kernels for aarch64. Same lane layout as the scalar reference: the
// f32 stripes use two q registers (lanes 0-3 and 4-7), the f64 stripes use
// two q registers (lanes 0-1 and 2-3), and the combine trees below reproduce
// the documented reduction order exactly.

namespace sgur::kernels {

namespace {

inline float reduce8_f32(float32x4_t lo, float32x4_t hi) {
    float32x4_t s = vaddq_f32(lo, hi);  // p0+p4, p1+p5, p2+p6, p3+p7
    float q0 = vgetq_lane_f32(s, 0);
    float q1 = vgetq_lane_f32(s, 1);
    float q2 = vgetq_lane_f32(s, 2);
    float q3 = vgetq_lane_f32(s, 3);
    return (q0 + q2) + (q1 + q3);
}

inline double reduce4_f64(float64x2_t lo, float64x2_t hi) {
    float64x2_t s = vaddq_f64(lo, hi);  // p0+p2, p1+p3
    return vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
}

float sqdist_f32_neon(const float* a, const float* b, std::size_t n) {
    float32x4_t accA = vdupq_n_f32(0.0f);
    float32x4_t accB = vdupq_n_f32(0.0f);
    std::size_t n8 = n & ~static_cast<std::size_t>(7);
    for (std::size_t i = 0; i < n8; i += 8) {
        float32x4_t d0 = vsubq_f32(vld1q_f32(a + i), vld1q_f32(b + i));
        float32x4_t d1 = vsubq_f32(vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
        accA = vfmaq_f32(accA, d0, d0);
        accB = vfmaq_f32(accB, d1, d1);
    }
    float tail = 0.0f;
    for (std::size_t i = n8; i < n; ++i) {
        float d = a[i] - b[i];
        tail = std::fma(d, d, tail);
    }
    return reduce8_f32(accA, accB) + tail;
}

double dot_f64_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double tail = 0.0;
    for (std::size_t i = n4; i < n; ++i) {
        tail = std::fma(a[i], b[i], tail);
    }
    return reduce4_f64(acc0, acc1) + tail;
}

double sumsq_f32_neon(const float* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        float32x4_t v = vld1q_f32(x + i);
        float64x2_t v0 = vcvt_f64_f32(vget_low_f32(v));
        float64x2_t v1 = vcvt_f64_f32(vget_high_f32(v));
        acc0 = vfmaq_f64(acc0, v0, v0);
        acc1 = vfmaq_f64(acc1, v1, v1);
    }
    double tail = 0.0;
    for (std::size_t i = n4; i < n; ++i) {
        double v = static_cast<double>(x[i]);
        tail = std::fma(v, v, tail);
    }
    return reduce4_f64(acc0, acc1) + tail;
}

void axpby_f32_neon(float alpha, const float* x, float beta, const float* y,
                    float* out, std::size_t n) {
    float32x4_t av = vdupq_n_f32(alpha);
    float32x4_t bv = vdupq_n_f32(beta);
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        float32x4_t by = vmulq_f32(bv, vld1q_f32(y + i));
        vst1q_f32(out + i, vfmaq_f32(by, av, vld1q_f32(x + i)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        out[i] = std::fma(alpha, x[i], beta * y[i]);
    }
}

void scaled_add_f32_f64_neon(double* acc, const float* row, double w, std::size_t n) {
    float64x2_t wv = vdupq_n_f64(w);
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        float32x4_t v = vld1q_f32(row + i);
        float64x2_t v0 = vcvt_f64_f32(vget_low_f32(v));
        float64x2_t v1 = vcvt_f64_f32(vget_high_f32(v));
        vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), wv, v0));
        vst1q_f64(acc + i + 2, vfmaq_f64(vld1q_f64(acc + i + 2), wv, v1));
    }
    for (std::size_t i = n4; i < n; ++i) {
        acc[i] = std::fma(w, static_cast<double>(row[i]), acc[i]);
    }
}

void axpy_f64_neon(double* acc, const double* x, double a, std::size_t n) {
    float64x2_t av = vdupq_n_f64(a);
    std::size_t n2 = n & ~static_cast<std::size_t>(1);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), av, vld1q_f64(x + i)));
    }
    for (std::size_t i = n2; i < n; ++i) {
        acc[i] = std::fma(a, x[i], acc[i]);
    }
}

}

const Ops* neon_ops() {
    static const Ops ops = {
        sqdist_f32_neon,
        dot_f64_neon,
        sumsq_f32_neon,
        axpby_f32_neon,
        scaled_add_f32_f64_neon,
        axpy_f64_neon,
        "neon",
    };
    return &ops;
}

}

#endif
