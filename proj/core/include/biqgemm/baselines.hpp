#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "biqgemm/kernel.hpp"
#include "biqgemm/matrix.hpp"
#include "biqgemm/packing.hpp"

namespace biqgemm {

/// Reference triple-loop product with double accumulation per cell.
template <typename T>
Matrix<T> gemm_dense(const Matrix<T>& a, const Matrix<T>& x,
                     OpCounters* counters = nullptr) {
    if (a.cols() != x.rows()) {
        throw std::invalid_argument("gemm_dense: shape mismatch");
    }
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t b = x.cols();
    Matrix<T> y(m, b);
    for (std::size_t r = 0; r < m; ++r) {
        const T* arow = a.row(r);
        for (std::size_t col = 0; col < b; ++col) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += double(arow[k]) * double(x(k, col));
            }
            y(r, col) = T(acc);
        }
    }
    if (counters) counters->fma_ops += std::uint64_t(m) * n * b;
    return y;
}

/// Unpack-then-GEMM path: expand the packed plane to a dense +-1 matrix
/// with unpack_word, then run the dense reference multiply.
template <typename T>
Matrix<T> gemm_unpack(const std::vector<std::uint32_t>& words, std::size_t m,
                      std::size_t n, const Matrix<T>& x,
                      OpCounters* counters = nullptr) {
    const BinaryPlane plane = unpack_plane_words(words, m, n);
    Matrix<T> dense(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            dense(r, c) = T(plane.get(r, c));
        }
    }
    return gemm_dense(dense, x, counters);
}

/// Result of the bandwidth probe. The values are intentionally wrong;
/// the probe exists only to measure packed-word traffic.
template <typename T>
struct ProbeResult {
    Matrix<T> y;
    bool values_valid = false;
    OpCounters ops;
};

/// Multiplies each packed word as a scalar against input fragments
/// without unpacking. One multiply-add per (row, word, batch column).
template <typename T>
ProbeResult<T> gemm_bandwidth_probe(const std::vector<std::uint32_t>& words,
                                    std::size_t m, std::size_t n,
                                    const Matrix<T>& x) {
    const std::size_t words_per_row = (n + 31) / 32;
    if (words.size() != m * words_per_row) {
        throw std::invalid_argument("gemm_bandwidth_probe: word count mismatch");
    }
    const std::size_t b = x.cols();
    ProbeResult<T> result{Matrix<T>(m, b), false, {}};
    for (std::size_t r = 0; r < m; ++r) {
        const std::uint32_t* wrow = words.data() + r * words_per_row;
        for (std::size_t col = 0; col < b; ++col) {
            double acc = 0.0;
            for (std::size_t w = 0; w < words_per_row; ++w) {
                acc += double(wrow[w]) * double(x((w * 32) % x.rows(), col));
            }
            result.y(r, col) = T(acc);
        }
    }
    result.ops.fma_ops = std::uint64_t(m) * words_per_row * b;
    return result;
}

}  // namespace biqgemm
