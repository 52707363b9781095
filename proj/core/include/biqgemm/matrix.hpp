#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace biqgemm {

/// Row-major dense matrix over float or double. Constructors reject
/// non-finite values so downstream kernels can assume clean data.
template <typename T>
class Matrix {
    static_assert(std::is_floating_point_v<T>);

public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("Matrix: dimensions must be nonzero");
        }
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("Matrix: dimensions must be nonzero");
        }
        if (data_.size() != rows * cols) {
            throw std::invalid_argument("Matrix: data length != rows*cols");
        }
        for (T v : data_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("Matrix: non-finite value");
            }
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    T operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    const T* row(std::size_t r) const { return data_.data() + r * cols_; }
    T* row(std::size_t r) { return data_.data() + r * cols_; }

    bool operator==(const Matrix& other) const = default;

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static Matrix random_uniform(std::size_t rows, std::size_t cols,
                                 std::uint64_t seed, T lo = T(-1), T hi = T(1)) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<T> dist(lo, hi);
        Matrix m(rows, cols);
        for (auto& v : m.data_) v = dist(rng);
        return m;
    }

    static Matrix random_normal(std::size_t rows, std::size_t cols,
                                std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<T> dist(T(0), T(1));
        Matrix m(rows, cols);
        for (auto& v : m.data_) v = dist(rng);
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Frobenius norm of the elementwise difference, accumulated in double.
template <typename T>
double frobenius_distance(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("frobenius_distance: shape mismatch");
    }
    double acc = 0.0;
    const std::size_t n = a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = double(a.data()[i]) - double(b.data()[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

template <typename T>
double frobenius_norm(const Matrix<T>& a) {
    double acc = 0.0;
    const std::size_t n = a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) {
        acc += double(a.data()[i]) * double(a.data()[i]);
    }
    return std::sqrt(acc);
}

}  // namespace biqgemm
