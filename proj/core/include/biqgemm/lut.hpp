#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "biqgemm/matrix.hpp"
#include "biqgemm/packing.hpp"

namespace biqgemm {

/// All 2^mu sign vectors of length mu; row k encodes key k
/// (bit t of k = 1 means +1 at position t).
inline BinaryPlane make_m_mu(unsigned mu) {
    if (mu < 1 || mu > kMaxLutUnit) {
        throw std::invalid_argument("make_m_mu: mu out of range [1,16]");
    }
    const std::size_t table = std::size_t(1) << mu;
    BinaryPlane m(table, mu);
    for (std::size_t k = 0; k < table; ++k) {
        for (unsigned t = 0; t < mu; ++t) {
            m.set(k, t, ((k >> t) & 1u) ? +1 : -1);
        }
    }
    return m;
}

/// Table build via 2^mu explicit dot products. Returns the number of
/// counted scalar ops (2^mu * mu).
template <typename T>
std::uint64_t build_lut_naive(const T* x, unsigned mu, double* out) {
    const std::size_t table = std::size_t(1) << mu;
    for (std::size_t k = 0; k < table; ++k) {
        double acc = 0.0;
        for (unsigned t = 0; t < mu; ++t) {
            const double s = ((k >> t) & 1u) ? 1.0 : -1.0;
            acc += s * double(x[t]);
        }
        out[k] = acc;
    }
    return std::uint64_t(table) * mu;
}

/// Dynamic-programming table build. Entry 0 (all -1) is -sum(x); each
/// first-half entry j + 2^(i-1) adds 2*x_(i-1) to entry j; the second
/// half is the bitwise-complement negation of the first. Counted ops:
/// mu adds for entry 0, one add per derived first-half entry, one
/// negation per second-half entry = 2^mu + mu - 1 total.
template <typename T>
std::uint64_t build_lut_dp(const T* x, unsigned mu, double* out) {
    double neg_sum = 0.0;
    for (unsigned t = 0; t < mu; ++t) neg_sum -= double(x[t]);
    out[0] = neg_sum;

    for (unsigned i = 1; i < mu; ++i) {
        const double step = 2.0 * double(x[i - 1]);  // computed once, reused
        const std::size_t half = std::size_t(1) << (i - 1);
        for (std::size_t j = 0; j < half; ++j) {
            out[j + half] = out[j] + step;
        }
    }

    const std::size_t table = std::size_t(1) << mu;
    for (std::size_t k = 0; k < table / 2; ++k) {
        out[(table - 1) - k] = -out[k];
    }
    return table + mu - 1;
}

enum class LutLayout { TableMajor, KeyMajor };

enum class LutBuilder { Dp, Naive };

/// A batch of lookup tables for a contiguous range of input groups.
/// One table per (batch column, group); entries are held in double.
///
/// Within each group of b tables:
///   table-major: address(table t, key k) = t * 2^mu + k
///   key-major:   address(table t, key k) = k * b + t
struct LutBlock {
    unsigned mu = 0;
    std::size_t batch = 0;        // tables per group
    std::size_t group_count = 0;
    LutLayout layout = LutLayout::TableMajor;
    std::vector<double> entries;  // group_count * batch * 2^mu

    std::size_t table_size() const { return std::size_t(1) << mu; }

    std::size_t index(std::size_t group, std::size_t table, std::uint32_t key) const {
        const std::size_t base = group * batch * table_size();
        if (layout == LutLayout::KeyMajor) {
            return base + std::size_t(key) * batch + table;
        }
        return base + table * table_size() + key;
    }

    double at(std::size_t group, std::size_t table, std::uint32_t key) const {
        return entries[index(group, table, key)];
    }

    const double* group_base(std::size_t group) const {
        return entries.data() + group * batch * table_size();
    }
};

/// Build tables for groups [group_begin, group_begin + group_count) of a
/// reshaped n x b input. Sub-vectors past row n are zero-padded.
template <typename T>
LutBlock build_lut_block(const Matrix<T>& x, std::size_t group_begin,
                         std::size_t group_count, unsigned mu, LutLayout layout,
                         std::uint64_t* build_ops = nullptr,
                         LutBuilder builder = LutBuilder::Dp) {
    if (group_count == 0) {
        throw std::invalid_argument("build_lut_block: empty tile");
    }
    const std::size_t b = x.cols();
    const std::size_t table = std::size_t(1) << mu;

    LutBlock block;
    block.mu = mu;
    block.batch = b;
    block.group_count = group_count;
    block.layout = layout;
    block.entries.resize(group_count * b * table);

    std::vector<T> sub(mu);
    std::vector<double> tmp(table);
    std::uint64_t ops = 0;
    for (std::size_t gl = 0; gl < group_count; ++gl) {
        const std::size_t g = group_begin + gl;
        for (std::size_t col = 0; col < b; ++col) {
            for (unsigned t = 0; t < mu; ++t) {
                const std::size_t r = g * mu + t;
                sub[t] = r < x.rows() ? x(r, col) : T(0);
            }
            double* dst = tmp.data();
            const bool direct = (layout == LutLayout::TableMajor);
            if (direct) dst = block.entries.data() + block.index(gl, col, 0);
            if (builder == LutBuilder::Dp) {
                ops += build_lut_dp(sub.data(), mu, dst);
            } else {
                ops += build_lut_naive(sub.data(), mu, dst);
            }
            if (!direct) {
                for (std::size_t k = 0; k < table; ++k) {
                    block.entries[block.index(gl, col, std::uint32_t(k))] = tmp[k];
                }
            }
        }
    }
    if (build_ops) *build_ops += ops;
    return block;
}

}  // namespace biqgemm
