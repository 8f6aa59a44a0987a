// Attention encoder/decoder with a cross-position compression layer.
//
// One row of a block is a sequence of tokens_in symbols; each 8-bit symbol is
// embedded as a bit vector into hidden_dim. The encoder runs `layers`
// residual blocks (multi-head self-attention, then a GELU feed-forward; no
// normalization layers), linearly compresses the position axis tokens_in ->
// tokens_out, and emits symbol_bits logits per compressed token. The decoder
// mirrors the encoder with an expansion map tokens_out -> tokens_in. Sigmoid
// outputs are probabilities; quantization at 0.5 produces storable bits.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dnastore/block.hpp"
#include "dnastore/util.hpp"

namespace dnastore::learner {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct ModelConfig {
    std::size_t tokens_in = 64;
    std::size_t hidden_dim = 32;
    std::size_t tokens_out = 56;
    std::size_t heads = 4;
    std::size_t layers = 2;
    std::size_t symbol_bits = 8;
    std::size_t ffn_dim = 64;
    std::uint64_t seed = 0;

    std::size_t head_dim() const { return hidden_dim / heads; }

    void validate() const {
        if (hidden_dim == 0 || heads == 0 || hidden_dim % heads != 0)
            throw std::invalid_argument("model: hidden_dim must be a positive multiple of heads");
        if (tokens_out >= tokens_in)
            throw std::invalid_argument("model: tokens_out must be smaller than tokens_in");
        if (tokens_in == 0 || layers == 0 || symbol_bits == 0 || symbol_bits > 8 || ffn_dim == 0)
            throw std::invalid_argument("model: invalid dimensions");
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct LayerParams {
    Matrix wq, wk, wv, wo;  // hidden x hidden; head h owns column block h
    Matrix w1, w2;          // hidden x ffn, ffn x hidden
    Vector b1, b2;
};

// One transformer stack plus its embedding, positional table, position
// resize map and output head.
struct StackParams {
    Matrix embed;  // symbol_bits x hidden
    Matrix pos;    // tokens x hidden
    std::vector<LayerParams> layers;
    Matrix resize;  // tokens_dst x tokens_src
    Matrix head_w;  // hidden x symbol_bits
    Vector head_b;
};

struct ModelParameters {
    ModelConfig config;
    StackParams encoder;  // resize: tokens_out x tokens_in
    StackParams decoder;  // resize: tokens_in x tokens_out

    // Visits every tensor in the declared serialization order.
    template <typename F>
    void for_each_tensor(F&& f) {
        for (StackParams* stack : {&encoder, &decoder}) {
            f(stack->embed);
            f(stack->pos);
            for (auto& layer : stack->layers) {
                f(layer.wq);
                f(layer.wk);
                f(layer.wv);
                f(layer.wo);
                f(layer.w1);
                f(layer.b1);
                f(layer.w2);
                f(layer.b2);
            }
            f(stack->resize);
            f(stack->head_w);
            f(stack->head_b);
        }
    }
    template <typename F>
    void for_each_tensor(F&& f) const {
        const_cast<ModelParameters*>(this)->for_each_tensor([&](auto& t) { f(std::as_const(t)); });
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for_each_tensor([&](const auto& t) { n += static_cast<std::size_t>(t.size()); });
        return n;
    }

    static ModelParameters zeros(const ModelConfig& config) {
        config.validate();
        ModelParameters p;
        p.config = config;
        auto make_stack = [&](std::size_t tokens_src, std::size_t tokens_dst) {
            StackParams s;
            s.embed = Matrix::Zero(static_cast<Eigen::Index>(config.symbol_bits),
                                   static_cast<Eigen::Index>(config.hidden_dim));
            s.pos = Matrix::Zero(static_cast<Eigen::Index>(tokens_src),
                                 static_cast<Eigen::Index>(config.hidden_dim));
            s.layers.resize(config.layers);
            for (auto& l : s.layers) {
                const auto d = static_cast<Eigen::Index>(config.hidden_dim);
                const auto f = static_cast<Eigen::Index>(config.ffn_dim);
                l.wq = Matrix::Zero(d, d);
                l.wk = Matrix::Zero(d, d);
                l.wv = Matrix::Zero(d, d);
                l.wo = Matrix::Zero(d, d);
                l.w1 = Matrix::Zero(d, f);
                l.b1 = Vector::Zero(f);
                l.w2 = Matrix::Zero(f, d);
                l.b2 = Vector::Zero(d);
            }
            s.resize = Matrix::Zero(static_cast<Eigen::Index>(tokens_dst),
                                    static_cast<Eigen::Index>(tokens_src));
            s.head_w = Matrix::Zero(static_cast<Eigen::Index>(config.hidden_dim),
                                    static_cast<Eigen::Index>(config.symbol_bits));
            s.head_b = Vector::Zero(static_cast<Eigen::Index>(config.symbol_bits));
            return s;
        };
        p.encoder = make_stack(config.tokens_in, config.tokens_out);
        p.decoder = make_stack(config.tokens_out, config.tokens_in);
        return p;
    }

    // Seeded Gaussian init. Projections start small; embeddings and the
    // positional tables start wide enough that tokens and positions are
    // separable from the first step. The resize maps start near a
    // truncation/repetition pattern so the compression path begins close to
    // a copy.
    static ModelParameters init(const ModelConfig& config) {
        ModelParameters p = zeros(config);
        NormalSampler normal(config.seed ^ 0x9e3779b97f4a7c15ULL);
        auto fill = [&](auto& t, double scale) {
            for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = scale * normal();
        };
        for (StackParams* s : {&p.encoder, &p.decoder}) {
            fill(s->embed, 0.3);
            fill(s->pos, 0.3);
            for (auto& l : s->layers) {
                fill(l.wq, 0.05);
                fill(l.wk, 0.05);
                fill(l.wv, 0.05);
                fill(l.wo, 0.05);
                fill(l.w1, 0.05);
                fill(l.w2, 0.05);
                l.b1.setZero();
                l.b2.setZero();
            }
            fill(s->resize, 0.02);
            // The head starts as the embedding transpose, which approximately
            // inverts the bit embedding from the first step.
            s->head_w = s->embed.transpose();
            s->head_b.setZero();
        }
        for (Eigen::Index i = 0; i < p.encoder.resize.rows(); ++i)
            p.encoder.resize(i, i % p.encoder.resize.cols()) += 1.0;
        for (Eigen::Index i = 0; i < p.decoder.resize.rows(); ++i)
            p.decoder.resize(i, i % p.decoder.resize.cols()) += 1.0;
        return p;
    }
};

// Scaled dot-product attention: softmax(Q K^T / sqrt(d_k)) V, row-wise.
inline Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, std::size_t d_k) {
    if (d_k == 0) throw std::invalid_argument("attention: d_k must be positive");
    if (q.cols() != k.cols() || k.rows() != v.rows())
        throw std::invalid_argument("attention: inner dimensions disagree");
    Matrix scores = q * k.transpose() / std::sqrt(static_cast<double>(d_k));
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const double m = scores.row(r).maxCoeff();
        scores.row(r) = (scores.row(r).array() - m).exp();
        scores.row(r) /= scores.row(r).sum();
    }
    return scores * v;
}

// Exact GELU and its derivative (smooth activations keep finite-difference
// gradient checks clean).
inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }
inline double gelu_derivative(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
    const double pdf = std::exp(-0.5 * x * x) * 0.3989422804014327;  // 1/sqrt(2*pi)
    return cdf + x * pdf;
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Forward activations retained for backpropagation, one entry per row.
struct LayerCache {
    Matrix input;             // tokens x hidden
    std::vector<Matrix> att;  // per head: softmaxed attention weights
    Matrix q, k, v;           // tokens x hidden (heads in column blocks)
    Matrix context;           // tokens x hidden, pre output-projection
    Matrix after_attention;   // tokens x hidden (input + attention output)
    Matrix ffn_pre;           // tokens x ffn
    Matrix ffn_act;           // tokens x ffn
};

struct StackCache {
    Matrix bits;  // tokens_src x symbol_bits input
    std::vector<LayerCache> layers;
    Matrix stack_out;  // tokens_src x hidden after the last layer
    Matrix resized;    // tokens_dst x hidden
    Matrix logits;     // tokens_dst x symbol_bits
    Matrix probs;      // sigmoid(logits)
};

namespace detail {

inline void run_layer(const LayerParams& lp, const ModelConfig& cfg, const Matrix& input,
                      LayerCache& cache) {
    const std::size_t dh = cfg.head_dim();
    cache.input = input;
    cache.q.noalias() = input * lp.wq;
    cache.k.noalias() = input * lp.wk;
    cache.v.noalias() = input * lp.wv;
    cache.att.resize(cfg.heads);
    cache.context.resize(input.rows(), input.cols());
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        const auto cols = static_cast<Eigen::Index>(h * dh);
        const auto width = static_cast<Eigen::Index>(dh);
        auto qh = cache.q.middleCols(cols, width);
        auto kh = cache.k.middleCols(cols, width);
        auto vh = cache.v.middleCols(cols, width);
        Matrix scores = qh * kh.transpose() * inv_sqrt;
        for (Eigen::Index r = 0; r < scores.rows(); ++r) {
            const double m = scores.row(r).maxCoeff();
            scores.row(r) = (scores.row(r).array() - m).exp();
            scores.row(r) /= scores.row(r).sum();
        }
        cache.att[h] = std::move(scores);
        cache.context.middleCols(cols, width).noalias() = cache.att[h] * vh;
    }
    cache.after_attention.noalias() = cache.context * lp.wo;
    cache.after_attention += input;

    cache.ffn_pre.noalias() = cache.after_attention * lp.w1;
    cache.ffn_pre.rowwise() += lp.b1.transpose();
    cache.ffn_act = cache.ffn_pre.unaryExpr([](double x) { return gelu(x); });
}

inline Matrix layer_output(const LayerParams& lp, const LayerCache& cache) {
    Matrix out = cache.ffn_act * lp.w2;
    out.rowwise() += lp.b2.transpose();
    out += cache.after_attention;
    return out;
}

// Runs one stack over a tokens x symbol_bits bit matrix. Bits enter the
// embedding on a +-1 scale so both bit values carry signal.
inline void run_stack(const StackParams& sp, const ModelConfig& cfg, const Matrix& bits,
                      StackCache& cache) {
    cache.bits = (2.0 * bits.array() - 1.0).matrix();
    Matrix h = cache.bits * sp.embed + sp.pos;
    cache.layers.resize(cfg.layers);
    for (std::size_t l = 0; l < cfg.layers; ++l) {
        run_layer(sp.layers[l], cfg, h, cache.layers[l]);
        h = layer_output(sp.layers[l], cache.layers[l]);
    }
    cache.stack_out = std::move(h);
    cache.resized.noalias() = sp.resize * cache.stack_out;
    cache.logits.noalias() = cache.resized * sp.head_w;
    cache.logits.rowwise() += sp.head_b.transpose();
    cache.probs = cache.logits.unaryExpr([](double x) { return sigmoid(x); });
}

}  // namespace detail

// Bit matrix (tokens x symbol_bits) for one row of symbols, MSB first.
inline Matrix row_to_bits(std::span<const std::uint8_t> symbols, std::size_t symbol_bits) {
    Matrix bits(static_cast<Eigen::Index>(symbols.size()), static_cast<Eigen::Index>(symbol_bits));
    for (std::size_t t = 0; t < symbols.size(); ++t)
        for (std::size_t b = 0; b < symbol_bits; ++b)
            bits(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) =
                (symbols[t] >> (symbol_bits - 1 - b)) & 1u ? 1.0 : 0.0;
    return bits;
}

inline std::vector<std::uint8_t> bits_to_row(const Matrix& bits) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(bits.rows()), 0);
    for (Eigen::Index t = 0; t < bits.rows(); ++t) {
        std::uint8_t v = 0;
        for (Eigen::Index b = 0; b < bits.cols(); ++b)
            v = static_cast<std::uint8_t>((v << 1) | (bits(t, b) >= 0.5 ? 1u : 0u));
        out[static_cast<std::size_t>(t)] = v;
    }
    return out;
}

inline Matrix quantize(const Matrix& probs) {
    return probs.unaryExpr([](double p) { return p >= 0.5 ? 1.0 : 0.0; });
}

// Encoder forward for one row: tokens_in symbols -> tokens_out x symbol_bits
// probabilities.
inline Matrix encode_row(const ModelParameters& params, std::span<const std::uint8_t> symbols) {
    if (symbols.size() != params.config.tokens_in)
        throw std::invalid_argument("encode_row: row length must equal tokens_in");
    StackCache cache;
    detail::run_stack(params.encoder, params.config, row_to_bits(symbols, params.config.symbol_bits),
                      cache);
    return cache.probs;
}

// Decoder forward for one row of representation bits (or probabilities).
inline Matrix decode_row(const ModelParameters& params, const Matrix& representation) {
    if (representation.rows() != static_cast<Eigen::Index>(params.config.tokens_out) ||
        representation.cols() != static_cast<Eigen::Index>(params.config.symbol_bits))
        throw std::invalid_argument("decode_row: representation shape mismatch");
    StackCache cache;
    detail::run_stack(params.decoder, params.config, representation, cache);
    return cache.probs;
}

// Block-level wrappers; rows are independent.
inline std::vector<Matrix> encode_block(const ModelParameters& params, const SymbolBlock& block) {
    if (block.cols != params.config.tokens_in)
        throw std::invalid_argument("encode_block: block width must equal tokens_in");
    std::vector<Matrix> out;
    out.reserve(block.rows);
    for (std::size_t r = 0; r < block.rows; ++r) out.push_back(encode_row(params, block.row(r)));
    return out;
}

inline std::vector<Matrix> decode_block(const ModelParameters& params,
                                        const SymbolBlock& representation) {
    if (representation.cols != params.config.tokens_out)
        throw std::invalid_argument("decode_block: block width must equal tokens_out");
    std::vector<Matrix> out;
    out.reserve(representation.rows);
    for (std::size_t r = 0; r < representation.rows; ++r) {
        const Matrix bits = row_to_bits(representation.row(r), params.config.symbol_bits);
        out.push_back(decode_row(params, bits));
    }
    return out;
}

}  // namespace dnastore::learner
