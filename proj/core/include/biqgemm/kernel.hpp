#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "biqgemm/lut.hpp"
#include "biqgemm/matrix.hpp"
#include "biqgemm/packing.hpp"
#include "biqgemm/quantize.hpp"

namespace biqgemm {

struct TileShape {
    std::size_t t_w = 1;  // tile width in groups
    std::size_t t_h = 1;  // tile height in key-matrix rows
};

struct OpCounters {
    std::uint64_t lut_build_ops = 0;
    std::uint64_t lookups = 0;
    std::uint64_t accumulate_ops = 0;
    std::uint64_t fma_ops = 0;

    OpCounters& operator+=(const OpCounters& o) {
        lut_build_ops += o.lut_build_ops;
        lookups += o.lookups;
        accumulate_ops += o.accumulate_ops;
        fma_ops += o.fma_ops;
        return *this;
    }
};

/// Per-call instrumentation: exact op tallies plus wall time split into
/// the build (table construction), query (lookup + accumulate) and
/// replace (buffer setup, final store) phases.
struct KernelStats {
    OpCounters ops;
    double build_seconds = 0.0;
    double query_seconds = 0.0;
    double replace_seconds = 0.0;
};

struct KernelOptions {
    std::size_t threads = 1;
    bool deterministic = true;
    LutBuilder builder = LutBuilder::Dp;
    // 0 disables the working-set check; the CLI passes its budget through.
    std::size_t budget_bytes = 0;
};

/// Largest t_w whose tables fit the working-set budget, with t_h sized
/// so a key tile fits alongside.
inline TileShape plan_tiles(std::size_t m, std::size_t groups, std::size_t b,
                            unsigned mu, std::size_t budget_bytes,
                            std::size_t entry_bytes = 4) {
    const std::size_t per_group = (std::size_t(1) << mu) * b * entry_bytes;
    if (per_group == 0 || budget_bytes < per_group) {
        throw std::invalid_argument("plan_tiles: budget below one group's tables");
    }
    TileShape tile;
    tile.t_w = std::min(groups, budget_bytes / per_group);
    const std::size_t key_bytes = sizeof(std::uint32_t);
    tile.t_h = std::clamp<std::size_t>(budget_bytes / (tile.t_w * key_bytes), 1, m);
    return tile;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lookup-accumulate over rows [r0, r1) for one group tile, all planes.
// acc holds one m x b double buffer per plane; each row of acc is owned
// by exactly one worker.
inline void query_rows(std::span<const KeyMatrix* const> planes,
                       const LutBlock& block, std::size_t tile_g,
                       std::size_t r0, std::size_t r1, std::size_t b,
                       std::vector<std::vector<double>>& acc) {
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const KeyMatrix& k = *planes[i];
        double* acc_i = acc[i].data();
        for (std::size_t r = r0; r < r1; ++r) {
            const std::uint32_t* keys = k.keys.data() + r * k.groups + tile_g;
            double* out = acc_i + r * b;
            for (std::size_t gl = 0; gl < block.group_count; ++gl) {
                const std::uint32_t key = keys[gl];
                if (block.layout == LutLayout::KeyMajor) {
                    const double* entry = block.group_base(gl) + std::size_t(key) * b;
                    for (std::size_t col = 0; col < b; ++col) {
                        out[col] += entry[col];
                    }
                } else {
                    for (std::size_t col = 0; col < b; ++col) {
                        out[col] += block.at(gl, col, key);
                    }
                }
            }
        }
    }
}

// Shared multi-plane kernel. Tables are built once per group tile and
// consumed by all planes; rows are partitioned across workers so no
// output cell is touched by two threads. Per-plane double accumulators
// keep the per-cell addition order fixed at ascending group index, so
// results are bitwise identical across tile shapes and worker counts.
template <typename T>
Matrix<T> run(std::span<const KeyMatrix* const> planes,
              std::span<const std::vector<T>* const> alphas,
              const Matrix<T>& x, const TileShape& tile,
              const KernelOptions& opts, KernelStats* stats) {
    const KeyMatrix& k0 = *planes[0];
    const std::size_t m = k0.m;
    const std::size_t groups = k0.groups;
    const unsigned mu = k0.mu;
    const std::size_t b = x.cols();
    const std::size_t beta = planes.size();

    for (const KeyMatrix* p : planes) {
        if (p->m != m || p->groups != groups || p->mu != mu) {
            throw std::invalid_argument("biqgemm: inconsistent plane shapes");
        }
    }
    if (std::size_t(mu) * groups < x.rows()) {
        throw std::invalid_argument("biqgemm: key matrix too narrow for input");
    }
    if (tile.t_w == 0 || tile.t_h == 0) {
        throw std::invalid_argument("biqgemm: tile dimensions must be nonzero");
    }
    if (opts.budget_bytes != 0) {
        const std::size_t need = tile.t_w * (std::size_t(1) << mu) * b * sizeof(T);
        if (need > opts.budget_bytes) {
            throw std::invalid_argument("biqgemm: tile exceeds working-set budget");
        }
    }

    KernelStats local;
    const LutLayout layout = b > 1 ? LutLayout::KeyMajor : LutLayout::TableMajor;

    auto t_replace = Clock::now();
    std::vector<std::vector<double>> acc(beta, std::vector<double>(m * b, 0.0));
    local.replace_seconds += seconds_since(t_replace);

    const std::size_t threads = std::max<std::size_t>(1, opts.threads);
    for (std::size_t tile_g = 0; tile_g < groups; tile_g += tile.t_w) {
        const std::size_t tcount = std::min(tile.t_w, groups - tile_g);

        auto t_build = Clock::now();
        const LutBlock block = build_lut_block(x, tile_g, tcount, mu, layout,
                                               &local.ops.lut_build_ops, opts.builder);
        local.build_seconds += seconds_since(t_build);

        auto t_query = Clock::now();
        if (threads == 1 || m < 2 * tile.t_h) {
            query_rows(planes, block, tile_g, 0, m, b, acc);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (m + threads - 1) / threads;
            for (std::size_t w = 0; w < threads; ++w) {
                const std::size_t r0 = w * chunk;
                const std::size_t r1 = std::min(m, r0 + chunk);
                if (r0 >= r1) break;
                pool.emplace_back([&, r0, r1] {
                    query_rows(planes, block, tile_g, r0, r1, b, acc);
                });
            }
            for (auto& t : pool) t.join();
        }
        local.query_seconds += seconds_since(t_query);

        local.ops.lookups += std::uint64_t(m) * tcount * b * beta;
        local.ops.accumulate_ops += std::uint64_t(m) * tcount * b * beta;
    }

    t_replace = Clock::now();
    Matrix<T> y(m, b);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t col = 0; col < b; ++col) {
            double sum = 0.0;
            for (std::size_t i = 0; i < beta; ++i) {
                const double a = alphas.empty() ? 1.0 : double((*alphas[i])[r]);
                sum += a * acc[i][r * b + col];
            }
            y(r, col) = T(sum);
        }
    }
    local.replace_seconds += seconds_since(t_replace);

    if (stats) {
        stats->ops += local.ops;
        stats->build_seconds += local.build_seconds;
        stats->query_seconds += local.query_seconds;
        stats->replace_seconds += local.replace_seconds;
    }
    return y;
}

}  // namespace detail

/// Single-plane multiply Y = B.X via table lookups, no scaling.
template <typename T>
Matrix<T> biqgemm_plane(const KeyMatrix& keys, const Matrix<T>& x,
                        const TileShape& tile, KernelStats* stats = nullptr,
                        const KernelOptions& opts = {}) {
    const KeyMatrix* planes[] = {&keys};
    return detail::run<T>(planes, {}, x, tile, opts, stats);
}

/// Key-matrix form of a quantized layer, ready for the lookup kernel.
template <typename T>
struct PackedLinear {
    std::size_t m = 0;
    std::size_t n = 0;
    unsigned beta = 0;
    unsigned mu = 0;
    std::vector<KeyMatrix> keys;           // one per plane
    std::vector<std::vector<T>> alphas;    // one length-m vector per plane
};

template <typename T>
PackedLinear<T> pack_linear(const QuantizedLinear<T>& q, unsigned mu) {
    PackedLinear<T> p;
    p.m = q.m;
    p.n = q.n;
    p.beta = q.beta;
    p.mu = mu;
    p.keys.reserve(q.beta);
    for (const BinaryPlane& plane : q.planes) {
        p.keys.push_back(pack_keys(plane, mu));
    }
    p.alphas = q.alphas;
    return p;
}

/// Multi-bit multiply Y = sum_i alpha_i o (B_i.X). Tables are built once
/// per input tile and shared across all beta planes.
template <typename T>
Matrix<T> biqgemm(const PackedLinear<T>& model, const Matrix<T>& x,
                  const TileShape& tile, KernelStats* stats = nullptr,
                  const KernelOptions& opts = {}) {
    std::vector<const KeyMatrix*> planes;
    std::vector<const std::vector<T>*> alphas;
    planes.reserve(model.beta);
    alphas.reserve(model.beta);
    for (unsigned i = 0; i < model.beta; ++i) {
        planes.push_back(&model.keys[i]);
        alphas.push_back(&model.alphas[i]);
    }
    return detail::run<T>(planes, alphas, x, tile, opts, stats);
}

}  // namespace biqgemm
