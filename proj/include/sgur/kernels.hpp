#ifndef SGUR_KERNELS_HPP
#define SGUR_KERNELS_HPP

#include <cstddef>

namespace sgur::kernels {

// Inner loops shared by aggregation, clustering, fusion, norm statistics and
// model scoring. Every kernel has a scalar reference implementation and may
// have vector implementations; all implementations of one kernel must return
// bitwise-identical results for identical inputs.
//
// To make that hold, reductions are defined with a fixed lane layout instead
// of plain left-to-right summation:
//
//   f32 reductions (sqdist_f32): 8 partial accumulators, lane j takes
//   elements 8k+j; remainder elements go to a single tail accumulator in
//   index order; result = (((p0+p4)+(p2+p6)) + ((p1+p5)+(p3+p7))) + tail.
//
//   f64 reductions (dot_f64, sumsq_f32): 4 partial accumulators, lane j takes
//   elements 4k+j; result = ((p0+p2)+(p1+p3)) + tail.
//
// Multiply-accumulate steps are fused (std::fma / vfmadd); elementwise
// kernels are defined pointwise so lane width cannot matter.

struct Ops {
    // Squared L2 distance in binary32, f32 reduction order.
    float (*sqdist_f32)(const float* a, const float* b, std::size_t n);
    // Dot product in binary64, f64 reduction order.
    double (*dot_f64)(const double* a, const double* b, std::size_t n);
    // Sum of squares of a binary32 row, accumulated in binary64.
    double (*sumsq_f32)(const float* x, std::size_t n);
    // out[i] = fma(alpha, x[i], beta * y[i])
    void (*axpby_f32)(float alpha, const float* x, float beta, const float* y,
                      float* out, std::size_t n);
    // acc[i] = fma(w, (double)row[i], acc[i])
    void (*scaled_add_f32_f64)(double* acc, const float* row, double w, std::size_t n);
    // acc[i] = fma(a, x[i], acc[i])
    void (*axpy_f64)(double* acc, const double* x, double a, std::size_t n);
    const char* name;
};

const Ops& scalar_ops();

// Null when the build or the host CPU lacks the extension.
const Ops* avx2_ops();
const Ops* neon_ops();

// Active implementation. Resolved once per process: SGUR_SIMD=scalar forces
// the reference path, SGUR_SIMD=avx2/neon requests an extension (falling back
// to scalar if unavailable), anything else picks the best supported one.
const Ops& ops();

}

#endif
