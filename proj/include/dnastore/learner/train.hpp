// Deterministic minibatch training. Given the same corpus, configuration and
// seeds, the loss trace and the resulting parameters are bit-identical.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "dnastore/errors.hpp"
#include "dnastore/learner/gradient.hpp"
#include "dnastore/learner/model.hpp"
#include "dnastore/util.hpp"

namespace dnastore::learner {

enum class Optimizer { momentum, adam };
enum class LrSchedule { constant, cosine };

struct TrainConfig {
    double learning_rate = 0.01;
    LrSchedule lr_schedule = LrSchedule::constant;
    double lr_floor_fraction = 0.05;  // cosine decays to this fraction of learning_rate
    std::size_t epochs = 10;
    std::size_t batch_size = 32;  // rows per step
    std::uint64_t seed = 1;
    Optimizer optimizer = Optimizer::momentum;
    double momentum = 0.9;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    // Rows per batch that enter the constraint term; 0 = all. The smooth
    // hairpin walk is the dominant cost, so large batches subsample it.
    std::size_t bc_rows_per_batch = 0;
    double grad_clip = 0.0;  // global-norm clip, 0 disables
    // Quantize the representation on the forward pass and copy gradients
    // through unchanged, so training sees exactly what storage will see.
    bool straight_through = true;

    void validate() const {
        if (learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be positive");
        if (batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
    }
};

struct TrainResult {
    ModelParameters params;
    std::vector<double> loss_trace;  // mean objective per epoch
};

struct TensorView {
    double* data;
    std::size_t size;
};

inline std::vector<TensorView> tensor_views(ModelParameters& p) {
    std::vector<TensorView> v;
    p.for_each_tensor([&](auto& t) { v.push_back({t.data(), static_cast<std::size_t>(t.size())}); });
    return v;
}

namespace detail {

class OptimizerState {
public:
    OptimizerState(const ModelConfig& cfg, const TrainConfig& tc)
        : tc_(tc), lr_(tc.learning_rate), first_(ModelParameters::zeros(cfg)),
          second_(ModelParameters::zeros(cfg)) {}

    // Cosine decay from learning_rate to learning_rate * lr_floor_fraction.
    void set_epoch(std::size_t epoch, std::size_t total_epochs) {
        if (tc_.lr_schedule == LrSchedule::constant || total_epochs <= 1) {
            lr_ = tc_.learning_rate;
            return;
        }
        const double progress = static_cast<double>(epoch) / static_cast<double>(total_epochs - 1);
        const double floor = tc_.learning_rate * tc_.lr_floor_fraction;
        lr_ = floor + 0.5 * (tc_.learning_rate - floor) *
                          (1.0 + std::cos(3.14159265358979323846 * progress));
    }

    void apply(ModelParameters& params, ModelParameters& grads) {
        auto p = tensor_views(params);
        auto g = tensor_views(grads);
        auto m = tensor_views(first_);
        auto v = tensor_views(second_);

        if (tc_.grad_clip > 0.0) {
            double sq = 0.0;
            for (const auto& t : g)
                for (std::size_t i = 0; i < t.size; ++i) sq += t.data[i] * t.data[i];
            const double norm = std::sqrt(sq);
            if (norm > tc_.grad_clip) {
                const double scale = tc_.grad_clip / norm;
                for (const auto& t : g)
                    for (std::size_t i = 0; i < t.size; ++i) t.data[i] *= scale;
            }
        }

        ++step_;
        if (tc_.optimizer == Optimizer::momentum) {
            for (std::size_t t = 0; t < p.size(); ++t)
                for (std::size_t i = 0; i < p[t].size; ++i) {
                    m[t].data[i] = tc_.momentum * m[t].data[i] + g[t].data[i];
                    p[t].data[i] -= lr_ * m[t].data[i];
                }
        } else {
            const double bc1 = 1.0 - std::pow(tc_.adam_beta1, static_cast<double>(step_));
            const double bc2 = 1.0 - std::pow(tc_.adam_beta2, static_cast<double>(step_));
            for (std::size_t t = 0; t < p.size(); ++t)
                for (std::size_t i = 0; i < p[t].size; ++i) {
                    double& mi = m[t].data[i];
                    double& vi = v[t].data[i];
                    const double gi = g[t].data[i];
                    mi = tc_.adam_beta1 * mi + (1.0 - tc_.adam_beta1) * gi;
                    vi = tc_.adam_beta2 * vi + (1.0 - tc_.adam_beta2) * gi * gi;
                    p[t].data[i] -= lr_ * (mi / bc1) /
                                    (std::sqrt(vi / bc2) + tc_.adam_epsilon);
                }
        }
    }

private:
    TrainConfig tc_;
    double lr_;
    std::size_t step_ = 0;
    ModelParameters first_;
    ModelParameters second_;
};

}  // namespace detail

// Flattens a block corpus into a pool of training rows.
inline SymbolBlock flatten_rows(const std::vector<SymbolBlock>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
    const std::size_t cols = corpus.front().cols;
    std::size_t rows = 0;
    for (const auto& b : corpus) {
        if (b.cols != cols) throw std::invalid_argument("train: inconsistent block widths");
        rows += b.rows;
    }
    SymbolBlock pool(rows, cols);
    std::size_t r = 0;
    for (const auto& b : corpus)
        for (std::size_t i = 0; i < b.rows; ++i, ++r)
            std::copy(b.row(i).begin(), b.row(i).end(), pool.row(r).begin());
    return pool;
}

inline TrainResult train(const std::vector<SymbolBlock>& corpus, const ModelConfig& model_config,
                         const TrainConfig& train_config, const LossWeights& weights,
                         const MaskSpec& mask) {
    model_config.validate();
    train_config.validate();
    mask.validate(model_config);

    TrainResult result;
    result.params = ModelParameters::init(model_config);
    const SymbolBlock pool = flatten_rows(corpus);
    if (pool.cols != model_config.tokens_in)
        throw std::invalid_argument("train: corpus row width must equal tokens_in");

    detail::OptimizerState opt(model_config, train_config);
    std::mt19937_64 rng(train_config.seed);
    std::vector<std::size_t> order(pool.rows);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
        opt.set_epoch(epoch, train_config.epochs);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[uniform_below(rng, i)]);

        double epoch_loss = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
            const std::size_t count = std::min(train_config.batch_size, order.size() - start);
            SymbolBlock batch(count, pool.cols);
            for (std::size_t r = 0; r < count; ++r)
                std::copy(pool.row(order[start + r]).begin(), pool.row(order[start + r]).end(),
                          batch.row(r).begin());

            const BatchForward fwd =
                forward_batch(result.params, batch, weights, mask, train_config.straight_through,
                              train_config.bc_rows_per_batch);
            if (!std::isfinite(fwd.total))
                throw TrainingDivergedError(epoch, "train: non-finite loss at epoch " +
                                                       std::to_string(epoch));
            ModelParameters grads = backward_batch(result.params, fwd, weights, mask);
            opt.apply(result.params, grads);
            epoch_loss += fwd.total;
            ++steps;
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(steps));
    }
    return result;
}

}  // namespace dnastore::learner
