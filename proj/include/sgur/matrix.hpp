#ifndef SGUR_MATRIX_HPP
#define SGUR_MATRIX_HPP

#include <cstddef>
#include <cstring>
#include <vector>

namespace sgur {

// Dense row-major matrix. Kept deliberately plain: kernels take raw row
// pointers, everything else goes through row()/at().
template <typename T>
struct BasicMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    BasicMatrix() = default;
    BasicMatrix(std::size_t r, std::size_t c, T fill = T{})
        : rows(r), cols(c), data(r * c, fill) {}

    T* row(std::size_t r) { return data.data() + r * cols; }
    const T* row(std::size_t r) const { return data.data() + r * cols; }

    T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool same_shape(const BasicMatrix& o) const {
        return rows == o.rows && cols == o.cols;
    }
};

using Matrix = BasicMatrix<float>;
using MatrixD = BasicMatrix<double>;

// Bit-level equality, distinguishing -0.0 from +0.0. Used by determinism
// checks; value equality would paper over reordered arithmetic.
template <typename T>
inline bool bitwise_equal(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
    if (a.rows != b.rows || a.cols != b.cols) return false;
    if (a.data.empty()) return b.data.empty();
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(T)) == 0;
}

inline MatrixD widen(const Matrix& m) {
    MatrixD out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = static_cast<double>(m.data[i]);
    return out;
}

inline Matrix narrow(const MatrixD& m) {
    Matrix out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = static_cast<float>(m.data[i]);
    return out;
}

}

#endif
