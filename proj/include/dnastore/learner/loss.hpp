// Training objective: masked reconstruction MSE plus the biological
// constraint term (GC distance and smoothed hairpin count) evaluated on the
// soft transcoding of the encoder output.
//
// The smooth hairpin surrogate replaces the pair indicator with the pairing
// probability under per-base marginals and the hard threshold gate T(m, n)
// with m * logistic((m - n) / tau). As tau -> 0 on point-mass inputs it
// converges to the hard counter away from threshold ties.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dnastore/base_map.hpp"
#include "dnastore/bio_metrics.hpp"
#include "dnastore/learner/model.hpp"

namespace dnastore::learner {

// Token positions whose reconstruction loss is zeroed; the storage decoder
// declares the same positions as erasures.
struct MaskSpec {
    std::vector<std::size_t> masked_symbol_indices;

    static MaskSpec final_symbol(const ModelConfig& config) {
        return MaskSpec{{config.tokens_in - 1}};
    }
    static MaskSpec none() { return MaskSpec{}; }

    void validate(const ModelConfig& config) const {
        for (std::size_t i : masked_symbol_indices)
            if (i >= config.tokens_in)
                throw std::invalid_argument("mask: symbol index out of range");
    }

    // tokens_in x symbol_bits matrix, 0 at masked symbols.
    Matrix build(const ModelConfig& config) const {
        validate(config);
        Matrix m = Matrix::Ones(static_cast<Eigen::Index>(config.tokens_in),
                                static_cast<Eigen::Index>(config.symbol_bits));
        for (std::size_t i : masked_symbol_indices)
            m.row(static_cast<Eigen::Index>(i)).setZero();
        return m;
    }
};

struct LossWeights {
    double alpha = 16.67;          // weight of the constraint term
    double beta = 0.058;           // weight of the hairpin distance inside it
    double gc_target = 50.0;       // percent
    double hairpin_target = 0.0;
    bio::HairpinParams hairpin{};  // geometry used by the smooth surrogate
    double tau = 0.1;              // gate smoothing temperature
};

// (1/N) sum M_ij (Z_ij - Zhat_ij)^2 with N the total element count.
inline double mask_mse(const Matrix& z, const Matrix& z_hat, const Matrix& mask) {
    if (z.rows() != z_hat.rows() || z.cols() != z_hat.cols() || z.rows() != mask.rows() ||
        z.cols() != mask.cols())
        throw std::invalid_argument("mask_mse: shape mismatch");
    if (z.size() == 0) throw std::invalid_argument("mask_mse: empty tensors");
    const Matrix diff = z - z_hat;
    return (mask.array() * diff.array().square()).sum() / static_cast<double>(z.size());
}

// --- soft transcoding -------------------------------------------------------

using NibbleProbs = std::vector<std::array<double, 16>>;

// Distribution over nibble values from independent bit probabilities, MSB
// first. The flat bit order is token-major.
inline NibbleProbs nibble_probs(const Matrix& bit_probs) {
    const std::size_t total_bits = static_cast<std::size_t>(bit_probs.size());
    if (total_bits % 4 != 0)
        throw std::invalid_argument("nibble_probs: bit count must be a multiple of 4");
    NibbleProbs out(total_bits / 4);
    for (std::size_t nib = 0; nib < out.size(); ++nib) {
        std::array<double, 4> p1{};
        for (std::size_t t = 0; t < 4; ++t) {
            const std::size_t flat = nib * 4 + t;
            p1[t] = bit_probs(static_cast<Eigen::Index>(flat / bit_probs.cols()),
                              static_cast<Eigen::Index>(flat % bit_probs.cols()));
        }
        for (unsigned v = 0; v < 16; ++v) {
            double p = 1.0;
            for (std::size_t t = 0; t < 4; ++t) {
                const bool bit = (v >> (3 - t)) & 1u;
                p *= bit ? p1[t] : 1.0 - p1[t];
            }
            out[nib][v] = p;
        }
    }
    return out;
}

// Expected GC content, in percent, of the transcoded sequence.
inline double soft_gc(const NibbleProbs& nibbles) {
    if (nibbles.empty()) throw std::invalid_argument("soft_gc: no nibbles");
    double gc = 0.0;
    for (const auto& dist : nibbles)
        for (unsigned v = 0; v < 16; ++v) gc += dist[v] * base_map::gc_count_of_nibble(v);
    return 100.0 * gc / (2.0 * static_cast<double>(nibbles.size()));
}

// Per-position base marginals (sequence length x 4, alphabetical order).
inline Matrix base_marginals(const NibbleProbs& nibbles) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(nibbles.size() * 2), 4);
    for (std::size_t i = 0; i < nibbles.size(); ++i) {
        for (unsigned v = 0; v < 16; ++v) {
            const auto& d = base_map::kNibbleToDinuc[v];
            m(static_cast<Eigen::Index>(2 * i), base_index(d[0])) += nibbles[i][v];
            m(static_cast<Eigen::Index>(2 * i + 1), base_index(d[1])) += nibbles[i][v];
        }
    }
    return m;
}

inline double stable_logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace detail {

// Pairing probability of two base marginal rows.
inline double pair_probability(const Matrix& marg, std::size_t p, std::size_t q) {
    const auto pi = static_cast<Eigen::Index>(p);
    const auto qi = static_cast<Eigen::Index>(q);
    return marg(pi, 0) * marg(qi, 3) + marg(pi, 3) * marg(qi, 0) + marg(pi, 1) * marg(qi, 2) +
           marg(pi, 2) * marg(qi, 1);
}

// Shared geometry walk for the smooth hairpin count. For every innermost
// anchor (a, b) the stem grows outward; expected matches accumulate and each
// admissible stem length contributes m * logistic((m - s*theta)/tau).
// When grad != nullptr the same walk scatters d(total)/d(marginals).
inline double soft_hairpin_walk(const Matrix& marg, const bio::HairpinParams& params, double tau,
                                Matrix* grad) {
    params.validate();
    if (tau <= 0.0) throw std::invalid_argument("soft_hairpin: tau must be positive");
    const std::size_t len = static_cast<std::size_t>(marg.rows());
    if (len < 2 * params.s_min + params.r_min) return 0.0;
    double total = 0.0;
    std::vector<double> gate_weight;  // d(contribution)/dm per stem length
    for (std::size_t a = 0; a + 1 < len; ++a) {
        for (std::size_t b = a + params.r_min + 1; b + 1 < len; ++b) {
            const std::size_t s_max = std::min(a + 1, len - 1 - b);
            if (s_max < params.s_min) continue;
            gate_weight.assign(s_max, 0.0);
            double m = 0.0;
            for (std::size_t d = 0; d < s_max; ++d) {
                m += pair_probability(marg, a - d, b + d);
                const std::size_t s = d + 1;
                if (s < params.s_min) continue;
                const double x = (m - static_cast<double>(s) * params.threshold_ratio) / tau;
                const double sig = stable_logistic(x);
                total += m * sig;
                gate_weight[d] = sig + m * sig * (1.0 - sig) / tau;
            }
            if (grad != nullptr) {
                // Pair d participates in every stem length s >= d+1.
                double suffix = 0.0;
                for (std::size_t d = s_max; d-- > 0;) {
                    suffix += gate_weight[d];
                    if (suffix == 0.0) continue;
                    const auto pi = static_cast<Eigen::Index>(a - d);
                    const auto qi = static_cast<Eigen::Index>(b + d);
                    // dE/dmarg: complement-permuted opposite row.
                    (*grad)(pi, 0) += suffix * marg(qi, 3);
                    (*grad)(pi, 3) += suffix * marg(qi, 0);
                    (*grad)(pi, 1) += suffix * marg(qi, 2);
                    (*grad)(pi, 2) += suffix * marg(qi, 1);
                    (*grad)(qi, 0) += suffix * marg(pi, 3);
                    (*grad)(qi, 3) += suffix * marg(pi, 0);
                    (*grad)(qi, 1) += suffix * marg(pi, 2);
                    (*grad)(qi, 2) += suffix * marg(pi, 1);
                }
            }
        }
    }
    return total;
}

}  // namespace detail

// Smoothed hairpin count of the transcoded sequence.
inline double soft_hairpin(const NibbleProbs& nibbles, const bio::HairpinParams& params,
                           double tau) {
    const Matrix marg = base_marginals(nibbles);
    return detail::soft_hairpin_walk(marg, params, tau, nullptr);
}

struct SoftMetrics {
    double gc_percent = 0.0;
    double hairpin = 0.0;
};

// (1/m) sum d(G, G*)^2 + (beta/m) sum d(H, H*)^2.
inline double bc_loss(std::span<const SoftMetrics> rows, const LossWeights& weights) {
    if (rows.empty()) throw std::domain_error("bc_loss: empty batch");
    double gc_term = 0.0, hp_term = 0.0;
    for (const auto& r : rows) {
        const double dg = r.gc_percent - weights.gc_target;
        const double dh = r.hairpin - weights.hairpin_target;
        gc_term += dg * dg;
        hp_term += dh * dh;
    }
    const double m = static_cast<double>(rows.size());
    return gc_term / m + weights.beta * hp_term / m;
}

inline double total_loss(double mask_mse_value, double bc_loss_value, const LossWeights& weights) {
    return mask_mse_value + weights.alpha * bc_loss_value;
}

// --- fused per-row computation used by training ------------------------------

// Soft metrics of one row's representation probabilities, with optional
// gradient: d_probs += dgc * dG/dprobs + dhp * dH/dprobs.
inline SoftMetrics row_soft_metrics(const Matrix& rep_probs, const bio::HairpinParams& params,
                                    double tau) {
    const NibbleProbs np = nibble_probs(rep_probs);
    SoftMetrics out;
    out.gc_percent = soft_gc(np);
    out.hairpin = soft_hairpin(np, params, tau);
    return out;
}

inline SoftMetrics row_soft_metrics_backward(const Matrix& rep_probs,
                                             const bio::HairpinParams& params, double tau,
                                             double dgc, double dhp, Matrix& d_probs) {
    const NibbleProbs np = nibble_probs(rep_probs);
    const Matrix marg = base_marginals(np);
    const std::size_t len = static_cast<std::size_t>(marg.rows());

    SoftMetrics out;
    // GC forward + gradient through marginals: dG/dmarg(p, X) = 100/len for G/C.
    double gc = 0.0;
    for (std::size_t p = 0; p < len; ++p) gc += marg(static_cast<Eigen::Index>(p), 1) +
                                                marg(static_cast<Eigen::Index>(p), 2);
    out.gc_percent = 100.0 * gc / static_cast<double>(len);

    Matrix d_marg = Matrix::Zero(marg.rows(), marg.cols());
    out.hairpin = detail::soft_hairpin_walk(marg, params, tau, &d_marg);
    d_marg *= dhp;
    const double gc_coeff = dgc * 100.0 / static_cast<double>(len);
    d_marg.col(1).array() += gc_coeff;
    d_marg.col(2).array() += gc_coeff;

    // marginals -> nibble distributions -> independent bit probabilities.
    const auto cols = rep_probs.cols();
    for (std::size_t nib = 0; nib < np.size(); ++nib) {
        std::array<double, 16> d_np{};
        for (unsigned v = 0; v < 16; ++v) {
            const auto& d = base_map::kNibbleToDinuc[v];
            d_np[v] = d_marg(static_cast<Eigen::Index>(2 * nib), base_index(d[0])) +
                      d_marg(static_cast<Eigen::Index>(2 * nib + 1), base_index(d[1]));
        }
        std::array<double, 4> p1{};
        for (std::size_t t = 0; t < 4; ++t) {
            const std::size_t flat = nib * 4 + t;
            p1[t] = rep_probs(static_cast<Eigen::Index>(flat / cols),
                              static_cast<Eigen::Index>(flat % cols));
        }
        for (std::size_t t = 0; t < 4; ++t) {
            double acc = 0.0;
            for (unsigned v = 0; v < 16; ++v) {
                if (d_np[v] == 0.0) continue;
                double partial = 1.0;
                for (std::size_t u = 0; u < 4; ++u) {
                    if (u == t) continue;
                    const bool bit = (v >> (3 - u)) & 1u;
                    partial *= bit ? p1[u] : 1.0 - p1[u];
                }
                const bool bit_t = (v >> (3 - t)) & 1u;
                acc += d_np[v] * (bit_t ? partial : -partial);
            }
            const std::size_t flat = nib * 4 + t;
            d_probs(static_cast<Eigen::Index>(flat / cols), static_cast<Eigen::Index>(flat % cols)) +=
                acc;
        }
    }
    return out;
}

}  // namespace dnastore::learner
