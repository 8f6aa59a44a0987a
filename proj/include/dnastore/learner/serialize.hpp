// Model parameter container, format version 1: ASCII magic "DSMODEL1",
// eight u64 config fields, u64 parameter count, then raw little-endian
// doubles in the for_each_tensor traversal order. The FNV-1a hash of the
// whole file identifies a model in package manifests.
#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "dnastore/errors.hpp"
#include "dnastore/learner/model.hpp"
#include "dnastore/util.hpp"

namespace dnastore::learner {

inline constexpr char kModelMagic[8] = {'D', 'S', 'M', 'O', 'D', 'E', 'L', '1'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

inline std::vector<std::uint8_t> serialize_model(const ModelParameters& params) {
    std::vector<std::uint8_t> out;
    auto put_u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    out.insert(out.end(), std::begin(kModelMagic), std::end(kModelMagic));
    const ModelConfig& c = params.config;
    put_u64(c.tokens_in);
    put_u64(c.hidden_dim);
    put_u64(c.tokens_out);
    put_u64(c.heads);
    put_u64(c.layers);
    put_u64(c.symbol_bits);
    put_u64(c.ffn_dim);
    put_u64(c.seed);
    put_u64(params.parameter_count());
    params.for_each_tensor([&](const auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            std::uint64_t bits;
            const double v = t.data()[i];
            std::memcpy(&bits, &v, 8);
            put_u64(bits);
        }
    });
    return out;
}

inline ModelParameters deserialize_model(const std::vector<std::uint8_t>& data) {
    std::size_t pos = 0;
    auto get_u64 = [&]() -> std::uint64_t {
        if (pos + 8 > data.size()) throw FormatError("model file truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos + static_cast<std::size_t>(i)]) << (8 * i);
        pos += 8;
        return v;
    };
    if (data.size() < 8 || std::memcmp(data.data(), kModelMagic, 8) != 0)
        throw FormatError("model file: bad magic");
    pos = 8;
    ModelConfig c;
    c.tokens_in = get_u64();
    c.hidden_dim = get_u64();
    c.tokens_out = get_u64();
    c.heads = get_u64();
    c.layers = get_u64();
    c.symbol_bits = get_u64();
    c.ffn_dim = get_u64();
    c.seed = get_u64();
    c.validate();
    ModelParameters params = ModelParameters::zeros(c);
    const std::uint64_t count = get_u64();
    if (count != params.parameter_count()) throw FormatError("model file: parameter count mismatch");
    params.for_each_tensor([&](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const std::uint64_t bits = get_u64();
            double v;
            std::memcpy(&v, &bits, 8);
            t.data()[i] = v;
        }
    });
    if (pos != data.size()) throw FormatError("model file: trailing bytes");
    return params;
}

inline std::string model_content_hash(const std::vector<std::uint8_t>& file_bytes) {
    return to_hex(fnv1a64(file_bytes.data(), file_bytes.size()));
}

inline void save_model(const std::filesystem::path& path, const ModelParameters& params) {
    const auto bytes = serialize_model(params);
    atomic_write_file(path, bytes.data(), bytes.size());
}

struct LoadedModel {
    ModelParameters params;
    std::string content_hash;
};

inline LoadedModel load_model(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    LoadedModel out{deserialize_model(bytes), model_content_hash(bytes)};
    return out;
}

}  // namespace dnastore::learner
