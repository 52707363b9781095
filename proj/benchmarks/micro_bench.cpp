#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "biqgemm/baselines.hpp"
#include "biqgemm/kernel.hpp"
#include "biqgemm/lut.hpp"
#include "biqgemm/matrix.hpp"
#include "biqgemm/quantize.hpp"

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

void BM_LutBuildDp(benchmark::State& state) {
    const unsigned mu = unsigned(state.range(0));
    auto x = Matrix<float>::random_normal(mu, 1, 1);
    std::vector<double> out(std::size_t(1) << mu);
    for (auto _ : state) {
        build_lut_dp(x.data(), mu, out.data());
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_LutBuildDp)->Arg(4)->Arg(8)->Arg(12);

void BM_LutBuildNaive(benchmark::State& state) {
    const unsigned mu = unsigned(state.range(0));
    auto x = Matrix<float>::random_normal(mu, 1, 1);
    std::vector<double> out(std::size_t(1) << mu);
    for (auto _ : state) {
        build_lut_naive(x.data(), mu, out.data());
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_LutBuildNaive)->Arg(4)->Arg(8)->Arg(12);

void BM_BiqgemmPlane(benchmark::State& state) {
    const std::size_t m = std::size_t(state.range(0));
    const std::size_t n = 1024, b = 32;
    auto keys = pack_keys(random_plane(m, n, 7), 8);
    auto x = Matrix<float>::random_normal(n, b, 8);
    const auto tile = plan_tiles(m, keys.groups, b, 8, 256 * 1024, sizeof(float));
    for (auto _ : state) {
        auto y = biqgemm_plane(keys, x, tile);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(m) * keys.groups * b);
}
BENCHMARK(BM_BiqgemmPlane)->Arg(512)->Arg(1024)->Arg(2048);

void BM_GemmUnpack(benchmark::State& state) {
    const std::size_t m = std::size_t(state.range(0));
    const std::size_t n = 1024, b = 32;
    auto words = pack_plane_words(random_plane(m, n, 7));
    auto x = Matrix<float>::random_normal(n, b, 8);
    for (auto _ : state) {
        auto y = gemm_unpack(words, m, n, x);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_GemmUnpack)->Arg(512)->Arg(1024);

void BM_BandwidthProbe(benchmark::State& state) {
    const std::size_t m = std::size_t(state.range(0));
    const std::size_t n = 1024, b = 32;
    auto words = pack_plane_words(random_plane(m, n, 7));
    auto x = Matrix<float>::random_normal(n, b, 8);
    for (auto _ : state) {
        auto probe = gemm_bandwidth_probe(words, m, n, x);
        benchmark::DoNotOptimize(probe.y.data());
    }
}
BENCHMARK(BM_BandwidthProbe)->Arg(512)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
