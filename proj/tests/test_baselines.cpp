#include <doctest.h>

#include <cstdint>
#include <random>

#include "biqgemm/baselines.hpp"
#include "biqgemm/kernel.hpp"
#include "biqgemm/matrix.hpp"

using namespace biqgemm;

namespace {

BinaryPlane random_plane(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BinaryPlane p(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            p.set(r, c, (rng() & 1) ? +1 : -1);
        }
    }
    return p;
}

// Second, independently written naive multiply (column-outer order,
// same per-cell double accumulation) used to cross-check gemm_dense.
template <typename T>
Matrix<T> naive_multiply_colmajor(const Matrix<T>& a, const Matrix<T>& x) {
    Matrix<T> y(a.rows(), x.cols());
    for (std::size_t col = 0; col < x.cols(); ++col) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += double(a(r, k)) * double(x(k, col));
            }
            y(r, col) = T(acc);
        }
    }
    return y;
}

}  // namespace

TEST_CASE("identity times X is X") {
    auto x = Matrix<double>::random_normal(5, 3, 1);
    auto y = gemm_dense(Matrix<double>::identity(5), x);
    CHECK(y == x);
}

TEST_CASE("1x1 product") {
    Matrix<double> a(1, 1, {2.0});
    Matrix<double> x(1, 1, {3.0});
    CHECK(gemm_dense(a, x)(0, 0) == 6.0);
}

TEST_CASE("dense multiply matches an independent implementation bitwise") {
    auto a = Matrix<double>::random_uniform(8, 8, 2);
    auto x = Matrix<double>::random_normal(8, 3, 3);
    CHECK(gemm_dense(a, x) == naive_multiply_colmajor(a, x));
}

TEST_CASE("fma counter is m*n*b") {
    auto a = Matrix<float>::random_uniform(6, 10, 4);
    auto x = Matrix<float>::random_normal(10, 3, 5);
    OpCounters c;
    gemm_dense(a, x, &c);
    CHECK(c.fma_ops == 6ull * 10 * 3);
}

TEST_CASE("unpack-then-GEMM equals the lookup kernel") {
    auto p = random_plane(16, 32, 6);
    auto x = Matrix<double>::random_normal(32, 4, 7);
    auto y_unpack = gemm_unpack(pack_plane_words(p), 16, 32, x);
    auto y_lut = biqgemm_plane(pack_keys(p, 8), x, TileShape{2, 8});
    CHECK(frobenius_distance(y_unpack, y_lut) < 1e-12);
}

TEST_CASE("all-zero words decode to all -1 weights") {
    std::vector<std::uint32_t> words(2, 0u);  // 2x32 plane
    auto x = Matrix<double>::random_normal(32, 2, 8);
    auto y = gemm_unpack(words, 2, 32, x);
    for (std::size_t col = 0; col < 2; ++col) {
        double colsum = 0.0;
        for (std::size_t r = 0; r < 32; ++r) colsum += x(r, col);
        CHECK(y(0, col) == doctest::Approx(-colsum));
        CHECK(y(1, col) == doctest::Approx(-colsum));
    }
}

TEST_CASE("bandwidth probe is flagged non-correct and counts loop trips") {
    auto p = random_plane(4, 64, 9);
    auto x = Matrix<float>::random_normal(64, 3, 10);
    auto probe = gemm_bandwidth_probe(pack_plane_words(p), 4, 64, x);
    CHECK_FALSE(probe.values_valid);
    CHECK(probe.ops.fma_ops == 4ull * 2 * 3);  // m * (n/32) * b
}

TEST_CASE("fma-to-lookup ratio is mu for square shapes") {
    const std::size_t n = 32;
    auto p = random_plane(n, n, 11);
    auto x = Matrix<float>::random_normal(n, 4, 12);
    for (unsigned mu : {2u, 4u, 8u}) {
        OpCounters dense;
        Matrix<float> d(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) d(r, c) = float(p.get(r, c));
        }
        gemm_dense(d, x, &dense);
        KernelStats lut;
        biqgemm_plane(pack_keys(p, mu), x, TileShape{2, 8}, &lut);
        CHECK(dense.fma_ops == mu * lut.ops.lookups);
    }
}
