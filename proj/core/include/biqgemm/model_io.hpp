#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "biqgemm/kernel.hpp"
#include "biqgemm/quantize.hpp"

namespace biqgemm {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadMagicError : FormatError {
    using FormatError::FormatError;
};

struct BadVersionError : FormatError {
    using FormatError::FormatError;
};

struct TruncatedError : FormatError {
    using FormatError::FormatError;
};

struct RangeError : FormatError {
    using FormatError::FormatError;
};

/// Serialized layout (all little-endian):
///   magic "BQGM" | version u16 | m u32 | n u32 | beta u8 | mu u8
/// then per plane:
///   alpha vector (m x f32), key rows (m x groups keys, u8 if mu <= 8
///   else u16), row-major.
std::vector<std::uint8_t> save(const QuantizedLinear<float>& q, unsigned mu);

PackedLinear<float> load(std::span<const std::uint8_t> bytes);

/// Expand a loaded model back to sign planes (pad bits are dropped).
QuantizedLinear<float> to_quantized_linear(const PackedLinear<float>& p);

void save_file(const QuantizedLinear<float>& q, unsigned mu,
               const std::string& path);
PackedLinear<float> load_file(const std::string& path);

/// Byte sizes of the W/A/O buffers for one layer at a given weight
/// bit-width. Weights count raw plane bits only; alpha overhead is
/// reported separately.
struct Footprint {
    std::uint64_t weight_bytes = 0;
    std::uint64_t activation_bytes = 0;
    std::uint64_t output_bytes = 0;
    std::uint64_t alpha_bytes = 0;

    std::uint64_t total_bytes() const {
        return weight_bytes + activation_bytes + output_bytes;
    }
    double weight_mb() const { return double(weight_bytes) / 1e6; }
    double activation_mb() const { return double(activation_bytes) / 1e6; }
    double output_mb() const { return double(output_bytes) / 1e6; }
    double total_mb() const { return double(total_bytes()) / 1e6; }
};

Footprint footprint(std::uint64_t m, std::uint64_t n, unsigned weight_bits,
                    std::uint64_t batch = 18, unsigned activation_bits = 32,
                    unsigned output_bits = 32);

}  // namespace biqgemm
