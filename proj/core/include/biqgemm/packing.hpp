#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace biqgemm {

inline constexpr unsigned kMaxLutUnit = 16;

/// Sign matrix over {-1,+1}, one bit per entry. Bit value 1 means +1,
/// bit value 0 means -1. Each row occupies ceil(cols/32) little-endian
/// 32-bit words, LSB-first within a word.
class BinaryPlane {
public:
    BinaryPlane() = default;

    BinaryPlane(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols),
          words_per_row_((cols + 31) / 32),
          words_(rows * words_per_row_, 0u) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("BinaryPlane: dimensions must be nonzero");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return words_per_row_; }

    int get(std::size_t r, std::size_t c) const {
        const std::uint32_t w = words_[r * words_per_row_ + c / 32];
        return ((w >> (c % 32)) & 1u) ? +1 : -1;
    }

    void set(std::size_t r, std::size_t c, int sign) {
        std::uint32_t& w = words_[r * words_per_row_ + c / 32];
        const std::uint32_t bit = 1u << (c % 32);
        if (sign > 0) {
            w |= bit;
        } else {
            w &= ~bit;
        }
    }

    const std::vector<std::uint32_t>& words() const { return words_; }

    bool operator==(const BinaryPlane& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint32_t> words_;
};

/// Mu-bit-packed form of a binary plane. Each key indexes a lookup
/// table; padded bit positions in the last group are 0.
struct KeyMatrix {
    std::size_t m = 0;
    std::size_t groups = 0;
    unsigned mu = 0;
    std::size_t pad = 0;          // groups*mu - n
    std::vector<std::uint32_t> keys;  // m x groups, row-major

    std::uint32_t key(std::size_t r, std::size_t g) const {
        return keys[r * groups + g];
    }

    bool operator==(const KeyMatrix& other) const = default;
};

/// Encode one sign sub-vector as an integer key, bit t = position t (LSB-first).
inline std::uint32_t encode_key(const int* signs, unsigned mu) {
    std::uint32_t k = 0;
    for (unsigned t = 0; t < mu; ++t) {
        if (signs[t] > 0) k |= (1u << t);
    }
    return k;
}

inline KeyMatrix pack_keys(const BinaryPlane& plane, unsigned mu) {
    if (mu < 1 || mu > kMaxLutUnit) {
        throw std::invalid_argument("pack_keys: mu out of range [1,16]");
    }
    KeyMatrix k;
    k.m = plane.rows();
    k.mu = mu;
    k.groups = (plane.cols() + mu - 1) / mu;
    k.pad = k.groups * mu - plane.cols();
    k.keys.assign(k.m * k.groups, 0u);
    for (std::size_t r = 0; r < k.m; ++r) {
        for (std::size_t g = 0; g < k.groups; ++g) {
            std::uint32_t key = 0;
            for (unsigned t = 0; t < mu; ++t) {
                const std::size_t c = g * mu + t;
                if (c < plane.cols() && plane.get(r, c) > 0) {
                    key |= (1u << t);
                }
            }
            k.keys[r * k.groups + g] = key;
        }
    }
    return k;
}

/// Expand one packed 32-bit word into signs: w_i = (((x >> i) & 1) * 2) - 1.
inline std::array<int, 32> unpack_word(std::uint32_t x) {
    std::array<int, 32> w;
    for (unsigned i = 0; i < 32; ++i) {
        w[i] = int(((x >> i) & 1u) * 2u) - 1;
    }
    return w;
}

/// Row-major LSB-first word stream; unpack_word inverts it per word.
inline std::vector<std::uint32_t> pack_plane_words(const BinaryPlane& plane) {
    return plane.words();
}

/// Rebuild a plane from its word stream.
inline BinaryPlane unpack_plane_words(const std::vector<std::uint32_t>& words,
                                      std::size_t rows, std::size_t cols) {
    BinaryPlane plane(rows, cols);
    if (words.size() != rows * plane.words_per_row()) {
        throw std::invalid_argument("unpack_plane_words: word count mismatch");
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t wi = 0; wi < plane.words_per_row(); ++wi) {
            const auto signs = unpack_word(words[r * plane.words_per_row() + wi]);
            for (unsigned i = 0; i < 32; ++i) {
                const std::size_t c = wi * 32 + i;
                if (c < cols) plane.set(r, c, signs[i]);
            }
        }
    }
    return plane;
}

}  // namespace biqgemm
