#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "biqgemm/matrix.hpp"
#include "biqgemm/packing.hpp"

namespace biqgemm {

/// Multi-bit binary-coding approximation of a weight matrix:
/// W ~ sum_i alpha_i o B_i, with per-output-row scaling vectors.
template <typename T>
struct QuantizedLinear {
    std::size_t m = 0;
    std::size_t n = 0;
    unsigned beta = 0;
    std::vector<BinaryPlane> planes;       // beta planes, each m x n
    std::vector<std::vector<T>> alphas;    // beta vectors, each length m
};

/// Greedy residual quantizer. Per row: repeatedly take the sign of the
/// residual (sign(0) = +1) and the mean absolute residual as the scale.
/// All residual arithmetic runs in double; alphas are stored at T.
template <typename T>
QuantizedLinear<T> quantize_greedy(const Matrix<T>& w, unsigned beta) {
    if (beta == 0) {
        throw std::invalid_argument("quantize_greedy: beta must be >= 1");
    }
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();

    QuantizedLinear<T> q;
    q.m = m;
    q.n = n;
    q.beta = beta;
    q.planes.assign(beta, BinaryPlane(m, n));
    q.alphas.assign(beta, std::vector<T>(m, T(0)));

    std::vector<double> residual(n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) residual[c] = double(w(r, c));
        for (unsigned i = 0; i < beta; ++i) {
            double abs_sum = 0.0;
            for (std::size_t c = 0; c < n; ++c) abs_sum += std::abs(residual[c]);
            const double alpha = abs_sum / double(n);
            q.alphas[i][r] = T(alpha);
            for (std::size_t c = 0; c < n; ++c) {
                const int sign = residual[c] < 0.0 ? -1 : +1;
                q.planes[i].set(r, c, sign);
                residual[c] -= alpha * double(sign);
            }
        }
    }
    return q;
}

/// Reconstruct the approximated weight matrix W-hat = sum_i alpha_i o B_i.
template <typename T>
Matrix<T> dequantize(const QuantizedLinear<T>& q) {
    Matrix<T> w(q.m, q.n);
    for (std::size_t r = 0; r < q.m; ++r) {
        for (std::size_t c = 0; c < q.n; ++c) {
            double acc = 0.0;
            for (unsigned i = 0; i < q.beta; ++i) {
                acc += double(q.alphas[i][r]) * double(q.planes[i].get(r, c));
            }
            w(r, c) = T(acc);
        }
    }
    return w;
}

template <typename T>
double quantization_error(const Matrix<T>& w, const QuantizedLinear<T>& q) {
    if (w.rows() != q.m || w.cols() != q.n) {
        throw std::invalid_argument("quantization_error: shape mismatch");
    }
    return frobenius_distance(w, dequantize(q));
}

}  // namespace biqgemm
