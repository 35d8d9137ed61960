#include "sgur/kernels.hpp"

#if defined(SGUR_BUILD_AVX2)

#include <cmath>
#include <immintrin.h>

// AVX2 + FMA kernels. Lane layout and combine trees follow kernels.hpp so the
// results match the scalar reference bit for bit. This translation unit is
// compiled with -mavx2 -mfma and must only be entered through avx2_ops(),
// which performs the CPU check.

namespace sgur::kernels {

namespace {

// ((p0+p4)+(p2+p6)) + ((p1+p5)+(p3+p7))
inline float reduce8_f32(__m256 acc) {
    __m128 lo = _mm256_castps256_ps128(acc);
    __m128 hi = _mm256_extractf128_ps(acc, 1);
    __m128 s = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehl_ps(s, s);
    __m128 s2 = _mm_add_ps(s, sh);
    __m128 s3 = _mm_shuffle_ps(s2, s2, 0x55);
    return _mm_cvtss_f32(_mm_add_ss(s2, s3));
}

// (p0+p2) + (p1+p3)
inline double reduce4_f64(__m256d acc) {
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d s = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(s, s);
    return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

float sqdist_f32_avx2(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t n8 = n & ~static_cast<std::size_t>(7);
    for (std::size_t i = 0; i < n8; i += 8) {
        __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        acc = _mm256_fmadd_ps(d, d, acc);
    }
    float tail = 0.0f;
    for (std::size_t i = n8; i < n; ++i) {
        float d = a[i] - b[i];
        tail = std::fma(d, d, tail);
    }
    return reduce8_f32(acc) + tail;
}

double dot_f64_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double tail = 0.0;
    for (std::size_t i = n4; i < n; ++i) {
        tail = std::fma(a[i], b[i], tail);
    }
    return reduce4_f64(acc) + tail;
}

double sumsq_f32_avx2(const float* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double tail = 0.0;
    for (std::size_t i = n4; i < n; ++i) {
        double v = static_cast<double>(x[i]);
        tail = std::fma(v, v, tail);
    }
    return reduce4_f64(acc) + tail;
}

void axpby_f32_avx2(float alpha, const float* x, float beta, const float* y,
                    float* out, std::size_t n) {
    __m256 av = _mm256_set1_ps(alpha);
    __m256 bv = _mm256_set1_ps(beta);
    std::size_t n8 = n & ~static_cast<std::size_t>(7);
    for (std::size_t i = 0; i < n8; i += 8) {
        __m256 by = _mm256_mul_ps(bv, _mm256_loadu_ps(y + i));
        _mm256_storeu_ps(out + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), by));
    }
    for (std::size_t i = n8; i < n; ++i) {
        out[i] = std::fma(alpha, x[i], beta * y[i]);
    }
}

void scaled_add_f32_f64_avx2(double* acc, const float* row, double w, std::size_t n) {
    __m256d wv = _mm256_set1_pd(w);
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(row + i));
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(wv, v, _mm256_loadu_pd(acc + i)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        acc[i] = std::fma(w, static_cast<double>(row[i]), acc[i]);
    }
}

void axpy_f64_avx2(double* acc, const double* x, double a, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(acc + i)));
    }
    for (std::size_t i = n4; i < n; ++i) {
        acc[i] = std::fma(a, x[i], acc[i]);
    }
}

}

const Ops* avx2_ops() {
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (!supported) return nullptr;
    static const Ops ops = {
        sqdist_f32_avx2,
        dot_f64_avx2,
        sumsq_f32_avx2,
        axpby_f32_avx2,
        scaled_add_f32_f64_avx2,
        axpy_f64_avx2,
        "avx2",
    };
    return &ops;
}

}

#endif
