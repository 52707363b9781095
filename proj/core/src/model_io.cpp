#include "biqgemm/model_io.hpp"

#include <cstring>
#include <fstream>

namespace biqgemm {

namespace {

constexpr char kMagic[4] = {'B', 'Q', 'G', 'M'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v & 0xff));
    out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct Reader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) {
            throw TruncatedError("model file truncated at offset " +
                                 std::to_string(pos));
        }
    }
    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = std::uint16_t(bytes[pos]) | std::uint16_t(bytes[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
};

}  // namespace

std::vector<std::uint8_t> save(const QuantizedLinear<float>& q, unsigned mu) {
    if (mu < 1 || mu > kMaxLutUnit) {
        throw std::invalid_argument("save: mu out of range [1,16]");
    }
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kVersion);
    put_u32(out, std::uint32_t(q.m));
    put_u32(out, std::uint32_t(q.n));
    out.push_back(std::uint8_t(q.beta));
    out.push_back(std::uint8_t(mu));

    const bool wide_keys = mu > 8;
    for (unsigned i = 0; i < q.beta; ++i) {
        for (std::size_t r = 0; r < q.m; ++r) put_f32(out, q.alphas[i][r]);
        const KeyMatrix keys = pack_keys(q.planes[i], mu);
        for (std::uint32_t key : keys.keys) {
            if (wide_keys) {
                put_u16(out, std::uint16_t(key));
            } else {
                out.push_back(std::uint8_t(key));
            }
        }
    }
    return out;
}

PackedLinear<float> load(std::span<const std::uint8_t> bytes) {
    Reader rd{bytes};
    rd.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw BadMagicError("bad magic, expected BQGM");
    }
    rd.pos = 4;
    const std::uint16_t version = rd.u16();
    if (version != kVersion) {
        throw BadVersionError("unsupported version " + std::to_string(version));
    }
    PackedLinear<float> p;
    p.m = rd.u32();
    p.n = rd.u32();
    p.beta = rd.u8();
    p.mu = rd.u8();
    if (p.m == 0 || p.n == 0 || p.beta == 0) {
        throw RangeError("zero dimension in header");
    }
    if (p.mu < 1 || p.mu > kMaxLutUnit) {
        throw RangeError("mu out of range [1,16]");
    }

    const std::size_t groups = (p.n + p.mu - 1) / p.mu;
    const std::uint32_t key_limit = 1u << p.mu;
    const bool wide_keys = p.mu > 8;

    for (unsigned i = 0; i < p.beta; ++i) {
        std::vector<float> alpha(p.m);
        for (std::size_t r = 0; r < p.m; ++r) alpha[r] = rd.f32();
        KeyMatrix keys;
        keys.m = p.m;
        keys.groups = groups;
        keys.mu = p.mu;
        keys.pad = groups * p.mu - p.n;
        keys.keys.resize(p.m * groups);
        for (auto& key : keys.keys) {
            key = wide_keys ? rd.u16() : rd.u8();
            if (key >= key_limit) {
                throw RangeError("key out of range for mu=" + std::to_string(p.mu));
            }
        }
        p.alphas.push_back(std::move(alpha));
        p.keys.push_back(std::move(keys));
    }
    if (rd.pos != bytes.size()) {
        throw FormatError("trailing bytes after payload");
    }
    return p;
}

QuantizedLinear<float> to_quantized_linear(const PackedLinear<float>& p) {
    QuantizedLinear<float> q;
    q.m = p.m;
    q.n = p.n;
    q.beta = p.beta;
    q.alphas = p.alphas;
    for (const KeyMatrix& keys : p.keys) {
        BinaryPlane plane(p.m, p.n);
        for (std::size_t r = 0; r < p.m; ++r) {
            for (std::size_t g = 0; g < keys.groups; ++g) {
                const std::uint32_t key = keys.key(r, g);
                for (unsigned t = 0; t < p.mu; ++t) {
                    const std::size_t c = g * p.mu + t;
                    if (c < p.n) plane.set(r, c, ((key >> t) & 1u) ? +1 : -1);
                }
            }
        }
        q.planes.push_back(std::move(plane));
    }
    return q;
}

void save_file(const QuantizedLinear<float>& q, unsigned mu,
               const std::string& path) {
    const std::vector<std::uint8_t> bytes = save(q, mu);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_file: cannot open " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
}

PackedLinear<float> load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_file: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load(bytes);
}

Footprint footprint(std::uint64_t m, std::uint64_t n, unsigned weight_bits,
                    std::uint64_t batch, unsigned activation_bits,
                    unsigned output_bits) {
    if (weight_bits == 0) {
        throw std::invalid_argument("footprint: weight bits must be >= 1");
    }
    Footprint f;
    f.weight_bytes = (m * n * weight_bits + 7) / 8;
    f.activation_bytes = (n * batch * activation_bits + 7) / 8;
    f.output_bytes = (m * batch * output_bits + 7) / 8;
    f.alpha_bytes = weight_bits >= 32 ? 0 : std::uint64_t(4) * m * weight_bits;
    return f;
}

}  // namespace biqgemm
