// Training-time forward pass and exact reverse-mode gradients for the full
// objective. The soft path feeds encoder output probabilities straight into
// the decoder, which is what the public gradient() computes and what the
// finite-difference checks validate. Training may instead quantize the
// representation on the forward pass and copy gradients through unchanged
// (straight-through); the backward code is shared.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dnastore/learner/loss.hpp"
#include "dnastore/learner/model.hpp"

namespace dnastore::learner {

struct RowForward {
    StackCache encoder;
    StackCache decoder;
    Matrix target_bits;   // tokens_in x symbol_bits, 0/1
    SoftMetrics metrics;  // soft metrics of the representation
    bool bc_active = false;
};

struct BatchForward {
    std::vector<RowForward> rows;
    double mse = 0.0;
    double bc = 0.0;
    double total = 0.0;
    std::size_t bc_rows = 0;
};

// Forward over a batch of rows. When bc_row_limit > 0 only the first
// bc_row_limit rows enter the constraint term (a training-cost control);
// 0 means all rows.
inline BatchForward forward_batch(const ModelParameters& params, const SymbolBlock& batch,
                                  const LossWeights& weights, const MaskSpec& mask,
                                  bool straight_through = false, std::size_t bc_row_limit = 0) {
    const ModelConfig& cfg = params.config;
    if (batch.cols != cfg.tokens_in)
        throw std::invalid_argument("forward_batch: batch width must equal tokens_in");
    mask.validate(cfg);
    const Matrix mask_matrix = mask.build(cfg);

    BatchForward out;
    out.rows.resize(batch.rows);
    out.bc_rows = bc_row_limit == 0 ? batch.rows : std::min<std::size_t>(bc_row_limit, batch.rows);

    const double n_total =
        static_cast<double>(batch.rows * cfg.tokens_in * cfg.symbol_bits);
    std::vector<SoftMetrics> bc_metrics;
    bc_metrics.reserve(out.bc_rows);

    for (std::size_t r = 0; r < batch.rows; ++r) {
        RowForward& row = out.rows[r];
        row.target_bits = row_to_bits(batch.row(r), cfg.symbol_bits);
        detail::run_stack(params.encoder, cfg, row.target_bits, row.encoder);
        const Matrix rep =
            straight_through ? quantize(row.encoder.probs) : row.encoder.probs;
        detail::run_stack(params.decoder, cfg, rep, row.decoder);

        const Matrix diff = row.target_bits - row.decoder.probs;
        out.mse += (mask_matrix.array() * diff.array().square()).sum();

        row.bc_active = r < out.bc_rows;
        if (row.bc_active && weights.alpha != 0.0) {
            row.metrics = row_soft_metrics(row.encoder.probs, weights.hairpin, weights.tau);
            bc_metrics.push_back(row.metrics);
        }
    }
    out.mse /= n_total;
    out.bc = (weights.alpha != 0.0 && !bc_metrics.empty()) ? bc_loss(bc_metrics, weights) : 0.0;
    out.total = total_loss(out.mse, out.bc, weights);
    return out;
}

namespace detail {

inline void backward_layer(const LayerParams& lp, const ModelConfig& cfg, const LayerCache& cache,
                           const Matrix& d_out, LayerParams& grad, Matrix& d_input) {
    // Feed-forward sublayer (residual).
    const Matrix d_ffn_act = d_out * lp.w2.transpose();
    grad.w2.noalias() += cache.ffn_act.transpose() * d_out;
    grad.b2.noalias() += d_out.colwise().sum().transpose();
    const Matrix d_ffn_pre =
        (d_ffn_act.array() *
         cache.ffn_pre.unaryExpr([](double x) { return gelu_derivative(x); }).array())
            .matrix();
    grad.w1.noalias() += cache.after_attention.transpose() * d_ffn_pre;
    grad.b1.noalias() += d_ffn_pre.colwise().sum().transpose();
    Matrix d_after_attention = d_out + d_ffn_pre * lp.w1.transpose();

    // Attention sublayer (residual).
    grad.wo.noalias() += cache.context.transpose() * d_after_attention;
    const Matrix d_context = d_after_attention * lp.wo.transpose();
    const std::size_t dh = cfg.head_dim();
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    Matrix d_q = Matrix::Zero(cache.q.rows(), cache.q.cols());
    Matrix d_k = Matrix::Zero(cache.k.rows(), cache.k.cols());
    Matrix d_v = Matrix::Zero(cache.v.rows(), cache.v.cols());
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        const auto cols = static_cast<Eigen::Index>(h * dh);
        const auto width = static_cast<Eigen::Index>(dh);
        const auto& att = cache.att[h];
        const auto vh = cache.v.middleCols(cols, width);
        const auto d_ch = d_context.middleCols(cols, width);
        Matrix d_att = d_ch * vh.transpose();
        d_v.middleCols(cols, width).noalias() = att.transpose() * d_ch;
        // Softmax backward per row: a .* (g - sum(g .* a)).
        for (Eigen::Index row = 0; row < d_att.rows(); ++row) {
            const double dot = (d_att.row(row).array() * att.row(row).array()).sum();
            d_att.row(row) = att.row(row).array() * (d_att.row(row).array() - dot);
        }
        d_att *= inv_sqrt;
        d_q.middleCols(cols, width).noalias() = d_att * cache.k.middleCols(cols, width);
        d_k.middleCols(cols, width).noalias() = d_att.transpose() * cache.q.middleCols(cols, width);
    }
    grad.wq.noalias() += cache.input.transpose() * d_q;
    grad.wk.noalias() += cache.input.transpose() * d_k;
    grad.wv.noalias() += cache.input.transpose() * d_v;

    d_input = d_after_attention;
    d_input.noalias() += d_q * lp.wq.transpose();
    d_input.noalias() += d_k * lp.wk.transpose();
    d_input.noalias() += d_v * lp.wv.transpose();
}

// Backward through one stack given d(loss)/d(probs); returns d(loss)/d(bits).
inline Matrix backward_stack(const StackParams& sp, const ModelConfig& cfg, const StackCache& cache,
                             const Matrix& d_probs, StackParams& grad) {
    const Matrix d_logits =
        (d_probs.array() * cache.probs.array() * (1.0 - cache.probs.array())).matrix();
    grad.head_w.noalias() += cache.resized.transpose() * d_logits;
    grad.head_b.noalias() += d_logits.colwise().sum().transpose();
    const Matrix d_resized = d_logits * sp.head_w.transpose();
    grad.resize.noalias() += d_resized * cache.stack_out.transpose();
    Matrix d_h = sp.resize.transpose() * d_resized;

    for (std::size_t l = cfg.layers; l-- > 0;) {
        Matrix d_in;
        backward_layer(sp.layers[l], cfg, cache.layers[l], d_h, grad.layers[l], d_in);
        d_h = std::move(d_in);
    }
    grad.embed.noalias() += cache.bits.transpose() * d_h;
    grad.pos.noalias() += d_h;
    // cache.bits holds the +-1 encoding; d/d(original bits) carries the
    // factor 2 from that rescaling.
    return 2.0 * (d_h * sp.embed.transpose());
}

}  // namespace detail

// Exact gradient of the total loss for the given forward pass. In
// straight-through mode the representation gradient is copied through the
// quantizer unchanged.
inline ModelParameters backward_batch(const ModelParameters& params, const BatchForward& fwd,
                                      const LossWeights& weights, const MaskSpec& mask) {
    const ModelConfig& cfg = params.config;
    ModelParameters grads = ModelParameters::zeros(cfg);
    const Matrix mask_matrix = mask.build(cfg);
    const double n_total =
        static_cast<double>(fwd.rows.size() * cfg.tokens_in * cfg.symbol_bits);
    const double m_bc = static_cast<double>(fwd.bc_rows);

    for (const RowForward& row : fwd.rows) {
        // d(mse)/d(decoder probs)
        const Matrix d_dec_probs = ((2.0 / n_total) * mask_matrix.array() *
                                    (row.decoder.probs.array() - row.target_bits.array()))
                                       .matrix();
        Matrix d_rep =
            detail::backward_stack(params.decoder, cfg, row.decoder, d_dec_probs, grads.decoder);

        if (row.bc_active && weights.alpha != 0.0) {
            const double dgc =
                weights.alpha * 2.0 * (row.metrics.gc_percent - weights.gc_target) / m_bc;
            const double dhp = weights.alpha * weights.beta * 2.0 *
                               (row.metrics.hairpin - weights.hairpin_target) / m_bc;
            row_soft_metrics_backward(row.encoder.probs, weights.hairpin, weights.tau, dgc, dhp,
                                      d_rep);
        }
        detail::backward_stack(params.encoder, cfg, row.encoder, d_rep, grads.encoder);
    }
    return grads;
}

// Public entry point: exact analytic gradient of total_loss on the soft path.
inline ModelParameters gradient(const ModelParameters& params, const SymbolBlock& batch,
                                const LossWeights& weights, const MaskSpec& mask,
                                double* loss_out = nullptr) {
    const BatchForward fwd = forward_batch(params, batch, weights, mask, /*straight_through=*/false);
    if (loss_out != nullptr) *loss_out = fwd.total;
    return backward_batch(params, fwd, weights, mask);
}

}  // namespace dnastore::learner
