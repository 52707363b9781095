#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "biqgemm/matrix.hpp"
#include "biqgemm/quantize.hpp"

using namespace biqgemm;

namespace {

// Independent oracle for one greedy step on a single row: enumerate all
// 2^n sign patterns, fit the optimal scale <r,b>/n for each, and return
// the (alpha, signs) pair minimizing the squared residual.
struct StepFit {
    double alpha;
    std::vector<int> signs;
    double sq_error;
};

StepFit brute_force_step(const std::vector<double>& r) {
    const std::size_t n = r.size();
    StepFit best{0.0, {}, 1e300};
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        std::vector<int> signs(n);
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            signs[i] = (mask >> i) & 1 ? +1 : -1;
            dot += r[i] * signs[i];
        }
        const double alpha = dot / double(n);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = r[i] - alpha * signs[i];
            err += d * d;
        }
        if (err < best.sq_error) best = {alpha, signs, err};
    }
    return best;
}

}  // namespace

TEST_CASE("one-bit exact sign pattern") {
    Matrix<double> w(1, 2, {1.0, -1.0});
    auto q = quantize_greedy(w, 1);
    CHECK(q.alphas[0][0] == doctest::Approx(1.0));
    CHECK(q.planes[0].get(0, 0) == +1);
    CHECK(q.planes[0].get(0, 1) == -1);
    CHECK(quantization_error(w, q) == doctest::Approx(0.0));
}

TEST_CASE("two-bit greedy on [3, 1] is exact") {
    Matrix<double> w(1, 2, {3.0, 1.0});
    auto q = quantize_greedy(w, 2);
    CHECK(q.alphas[0][0] == doctest::Approx(2.0));
    CHECK(q.planes[0].get(0, 0) == +1);
    CHECK(q.planes[0].get(0, 1) == +1);
    CHECK(q.alphas[1][0] == doctest::Approx(1.0));
    CHECK(q.planes[1].get(0, 0) == +1);
    CHECK(q.planes[1].get(0, 1) == -1);
    CHECK(quantization_error(w, q) == doctest::Approx(0.0));

    // Each greedy step must match the exhaustive single-step fit.
    auto step1 = brute_force_step({3.0, 1.0});
    CHECK(std::abs(step1.alpha) == doctest::Approx(2.0));
    auto step2 = brute_force_step({1.0, -1.0});
    CHECK(std::abs(step2.alpha) == doctest::Approx(1.0));
}

TEST_CASE("zero row uses sign(0) = +1") {
    Matrix<double> w(1, 2, {0.0, 0.0});
    auto q = quantize_greedy(w, 1);
    CHECK(q.alphas[0][0] == 0.0);
    CHECK(q.planes[0].get(0, 0) == +1);
    CHECK(q.planes[0].get(0, 1) == +1);
}

TEST_CASE("dequantize broadcasts alpha per row") {
    QuantizedLinear<double> q;
    q.m = 1;
    q.n = 2;
    q.beta = 1;
    q.planes.emplace_back(1, 2);
    q.planes[0].set(0, 0, +1);
    q.planes[0].set(0, 1, +1);
    q.alphas.push_back({2.0});
    auto w = dequantize(q);
    CHECK(w(0, 0) == 2.0);
    CHECK(w(0, 1) == 2.0);
}

TEST_CASE("quantization error after one greedy step on [3, 1]") {
    Matrix<double> w(1, 2, {3.0, 1.0});
    auto q = quantize_greedy(w, 1);
    CHECK(quantization_error(w, q) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("residual norm nonincreasing in beta") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto w = Matrix<double>::random_uniform(4, 4, seed);
        double prev = frobenius_norm(w);
        for (unsigned beta = 1; beta <= 4; ++beta) {
            const double err = quantization_error(w, quantize_greedy(w, beta));
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
    }
}

TEST_CASE("per-step alpha is optimal under finite perturbation") {
    auto w = Matrix<double>::random_uniform(1, 8, 42);
    auto q = quantize_greedy(w, 1);
    const double alpha = q.alphas[0][0];
    auto sq_err = [&](double a) {
        double acc = 0.0;
        for (std::size_t c = 0; c < 8; ++c) {
            const double d = w(0, c) - a * q.planes[0].get(0, c);
            acc += d * d;
        }
        return acc;
    };
    const double base = sq_err(alpha);
    for (double eps : {1e-3, 1e-2, 0.1}) {
        CHECK(sq_err(alpha + eps) > base);
        CHECK(sq_err(alpha - eps) > base);
    }
}

TEST_CASE("rows quantize independently") {
    auto w = Matrix<double>::random_uniform(6, 5, 7);
    auto q = quantize_greedy(w, 3);
    for (std::size_t r = 0; r < 6; ++r) {
        std::vector<double> row(w.row(r), w.row(r) + 5);
        Matrix<double> single(1, 5, row);
        auto qs = quantize_greedy(single, 3);
        for (unsigned i = 0; i < 3; ++i) {
            CHECK(qs.alphas[i][0] == q.alphas[i][r]);
            for (std::size_t c = 0; c < 5; ++c) {
                CHECK(qs.planes[i].get(0, c) == q.planes[i].get(r, c));
            }
        }
    }
}

TEST_CASE("beta=3 residual no worse than beta=2 on random 4x4") {
    auto w = Matrix<double>::random_uniform(4, 4, 99);
    const double e2 = quantization_error(w, quantize_greedy(w, 2));
    const double e3 = quantization_error(w, quantize_greedy(w, 3));
    CHECK(e3 <= e2 + 1e-12);
}

TEST_CASE("rejects beta = 0 and non-finite input") {
    Matrix<double> w(1, 2, {1.0, 2.0});
    CHECK_THROWS_AS(quantize_greedy(w, 0), std::invalid_argument);
    CHECK_THROWS_AS(Matrix<double>(1, 1, {std::nan("")}), std::invalid_argument);
}
