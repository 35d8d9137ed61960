#include "sgur/kernels.hpp"

#include <cmath>

// Reference kernels. These spell out the lane layout from kernels.hpp in
// plain code; the vector variants must reproduce them bit for bit.

namespace sgur::kernels {

namespace {

float sqdist_f32_scalar(const float* a, const float* b, std::size_t n) {
    float p[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t n8 = n & ~static_cast<std::size_t>(7);
    for (std::size_t i = 0; i < n8; i += 8) {
        for (std::size_t j = 0; j < 8; ++j) {
            float d = a[i + j] - b[i + j];
            p[j] = std::fma(d, d, p[j]);
        }
    }
    float tail = 0.0f;
    for (std::size_t i = n8; i < n; ++i) {
        float d = a[i] - b[i];
        tail = std::fma(d, d, tail);
    }
    return (((p[0] + p[4]) + (p[2] + p[6])) + ((p[1] + p[5]) + (p[3] + p[7]))) + tail;
}

double dot_f64_scalar(const double* a, const double* b, std::size_t n) {
    double p[4] = {0, 0, 0, 0};
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            p[j] = std::fma(a[i + j], b[i + j], p[j]);
        }
    }
    double tail = 0.0;
    for (std::size_t i = n4; i < n; ++i) {
        tail = std::fma(a[i], b[i], tail);
    }
    return ((p[0] + p[2]) + (p[1] + p[3])) + tail;
}

double sumsq_f32_scalar(const float* x, std::size_t n) {
    double p[4] = {0, 0, 0, 0};
    std::size_t n4 = n & ~static_cast<std::size_t>(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            double v = static_cast<double>(x[i + j]);
            p[j] = std::fma(v, v, p[j]);
        }
    }
    double tail = 0.0;
    for (std::size_t i = n4; i < n; ++i) {
        double v = static_cast<double>(x[i]);
        tail = std::fma(v, v, tail);
    }
    return ((p[0] + p[2]) + (p[1] + p[3])) + tail;
}

void axpby_f32_scalar(float alpha, const float* x, float beta, const float* y,
                      float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::fma(alpha, x[i], beta * y[i]);
    }
}

void scaled_add_f32_f64_scalar(double* acc, const float* row, double w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] = std::fma(w, static_cast<double>(row[i]), acc[i]);
    }
}

void axpy_f64_scalar(double* acc, const double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] = std::fma(a, x[i], acc[i]);
    }
}

}

const Ops& scalar_ops() {
    static const Ops ops = {
        sqdist_f32_scalar,
        dot_f64_scalar,
        sumsq_f32_scalar,
        axpby_f32_scalar,
        scaled_add_f32_f64_scalar,
        axpy_f64_scalar,
        "scalar",
    };
    return ops;
}

}
