#include "mint/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "mint/error.hpp"
#include "mint/random.hpp"

namespace mint::nn {

void TrainConfig::validate() const {
    if (batch_size == 0) throw DomainError("batch_size must be at least 1");
    if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be positive");
    if (!(lr_multiplier > 0.0)) throw DomainError("lr_multiplier must be positive");
    if (weight_decay < 0.0) throw DomainError("weight_decay must be non-negative");
    if (momentum < 0.0 || momentum >= 1.0) throw DomainError("momentum must lie in [0, 1)");
    for (std::size_t k = 1; k < milestones.size(); ++k) {
        if (milestones[k] <= milestones[k - 1]) throw DomainError("milestones must be strictly increasing");
    }
}

double TrainConfig::learning_rate_at(std::size_t epoch) const {
    double lr = learning_rate;
    for (std::size_t m : milestones)
        if (epoch >= m) lr *= lr_multiplier;
    return lr;
}

Gradients loss_and_gradients(const Network64& net, const MatrixD& inputs,
                             std::span<const std::uint32_t> targets, bool input_gradient) {
    const auto batch = inputs.rows();
    if (static_cast<std::size_t>(batch) != targets.size()) throw ShapeError("one target per row required");
    if (net.activations.empty() || net.activations.back() != Activation::softmax) {
        throw ShapeError("cross-entropy needs a softmax output layer");
    }
    const auto fw = forward(net, inputs);
    const MatrixD& probs = fw.probabilities();
    const std::size_t layers = net.weights.size();

    Gradients g;
    g.weights.resize(layers);
    g.biases.resize(layers);

    MatrixD delta = probs;
    double loss = 0.0;
    for (Eigen::Index r = 0; r < batch; ++r) {
        const auto t = static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)]);
        if (t >= probs.cols()) throw DomainError("target class out of range");
        Eigen::Index arg = 0;
        probs.row(r).maxCoeff(&arg);
        g.hits += arg == t;
        loss -= std::log(std::max(probs(r, t), 1e-300));
        delta(r, t) -= 1.0;
    }
    const double scale = 1.0 / static_cast<double>(batch);
    g.loss = loss * scale;
    delta *= scale;

    for (std::size_t k = layers; k-- > 0;) {
        const MatrixD& prev = k == 0 ? inputs : fw.activations[k - 1];
        g.weights[k].noalias() = delta.transpose() * prev;
        g.biases[k] = delta.colwise().sum().transpose();
        if (k == 0 && !input_gradient) break;
        MatrixD upstream = delta * net.weights[k];
        if (k == 0) {
            g.inputs = std::move(upstream);
            break;
        }
        // relu'(z) = 1 where the post-activation is positive
        delta = upstream.cwiseProduct((prev.array() > 0.0).cast<double>().matrix());
    }
    return g;
}

namespace {

MatrixD mask_matrix(const prune::LayerMask& m) {
    MatrixD out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
    for (std::size_t i = 0; i < m.keep.size(); ++i) out.data()[i] = m.keep[i] ? 1.0 : 0.0;
    return out;
}

// Parameters live in float32; the update is computed in float64 and rounded back.
template <typename Derived>
void assign_rounded(Eigen::MatrixBase<Derived>& dst, const auto& expr) {
    dst = expr.template cast<float>().template cast<double>();
}

void store(const Network64& net, MlpModel& model) {
    for (std::size_t k = 0; k < model.layer_count(); ++k) {
        auto& layer = model.layers()[k];
        const MatrixD& w = net.weights[k];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            layer.weights[i] = static_cast<float>(w.data()[i]);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            layer.bias[i] = static_cast<float>(net.biases[k](static_cast<Eigen::Index>(i)));
        }
    }
}

TrainResult run_training(const MlpModel& initial, const Dataset& data, const TrainConfig& config,
                         const prune::PruneMask* mask, const EpochObserver& observer) {
    config.validate();
    data.validate();
    initial.validate();
    if (data.dims != initial.input_width()) throw ShapeError("dataset width does not match the model input");
    if (data.classes > initial.output_width()) throw ShapeError("model has fewer outputs than classes");

    TrainResult result{initial, {}};
    if (config.epochs == 0) return result;

    Network64 net = Network64::from(initial);
    const std::size_t layers = net.weights.size();
    std::vector<MatrixD> masks;
    if (mask) {
        for (const auto& m : mask->layers) masks.push_back(mask_matrix(m));
        for (std::size_t k = 0; k < layers; ++k) net.weights[k] = net.weights[k].cwiseProduct(masks[k]);
    }
    std::vector<MatrixD> vel_w;
    std::vector<VectorD> vel_b;
    for (std::size_t k = 0; k < layers; ++k) {
        vel_w.push_back(MatrixD::Zero(net.weights[k].rows(), net.weights[k].cols()));
        vel_b.push_back(VectorD::Zero(net.biases[k].size()));
    }

    std::vector<std::size_t> order(data.rows);
    std::vector<std::uint32_t> targets;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(config.seed, {epoch}));
        std::shuffle(order.begin(), order.end(), rng);
        const double lr = config.learning_rate_at(epoch);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < data.rows; start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, data.rows - start);
            std::span<const std::size_t> idx(order.data() + start, count);
            const MatrixD x = data.batch(idx);
            targets.clear();
            for (std::size_t i : idx) targets.push_back(data.labels[i]);

            Gradients g = loss_and_gradients(net, x, targets);
            if (!std::isfinite(g.loss)) {
                throw TrainingFailure("training diverged at epoch " + std::to_string(epoch));
            }
            loss_sum += g.loss;
            ++batches;
            correct += g.hits;

            for (std::size_t k = 0; k < layers; ++k) {
                MatrixD gw = g.weights[k] + config.weight_decay * net.weights[k];
                VectorD gb = g.biases[k] + config.weight_decay * net.biases[k];
                if (mask) gw = gw.cwiseProduct(masks[k]);
                vel_w[k] = config.momentum * vel_w[k] + gw;
                vel_b[k] = config.momentum * vel_b[k] + gb;
                assign_rounded(net.weights[k], net.weights[k] - lr * vel_w[k]);
                assign_rounded(net.biases[k], net.biases[k] - lr * vel_b[k]);
                if (mask) net.weights[k] = net.weights[k].cwiseProduct(masks[k]);
            }
        }
        result.trace.push_back({epoch, lr, loss_sum / static_cast<double>(batches),
                                static_cast<double>(correct) / static_cast<double>(data.rows)});
        if (observer) {
            store(net, result.model);
            observer(epoch, result.model);
        }
    }
    store(net, result.model);
    return result;
}

}  // namespace

TrainResult train(const MlpModel& model, const Dataset& data, const TrainConfig& config,
                  const EpochObserver& observer) {
    return run_training(model, data, config, nullptr, observer);
}

TrainResult retrain_masked(const MlpModel& model, const prune::PruneMask& mask, const Dataset& data,
                           const TrainConfig& config, const EpochObserver& observer) {
    if (mask.layers.size() != model.layer_count()) throw ShapeError("mask layer count differs from model");
    for (std::size_t k = 0; k < model.layer_count(); ++k) {
        if (mask.layers[k].rows != model.layers()[k].out || mask.layers[k].cols != model.layers()[k].in) {
            throw ShapeError("mask for " + MlpModel::layer_name(k) + " does not match the weight shape");
        }
    }
    return run_training(model, data, config, &mask, observer);
}

Evaluation evaluate(const MlpModel& model, const Dataset& data) {
    data.validate();
    const Network64 net = Network64::from(model);
    Evaluation ev;
    ev.confidences.reserve(data.rows);
    std::size_t hits = 0;
    constexpr std::size_t kChunk = 1000;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < data.rows; start += kChunk) {
        const std::size_t count = std::min(kChunk, data.rows - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        const auto fw = forward(net, data.batch(idx));
        const MatrixD& probs = fw.probabilities();
        for (Eigen::Index r = 0; r < probs.rows(); ++r) {
            Eigen::Index arg = 0;
            const double conf = probs.row(r).maxCoeff(&arg);
            const bool ok = static_cast<std::uint32_t>(arg) == data.labels[start + static_cast<std::size_t>(r)];
            hits += ok;
            ev.confidences.push_back(conf);
            ev.predictions.push_back(static_cast<std::uint32_t>(arg));
            ev.correct.push_back(ok);
        }
    }
    ev.accuracy = static_cast<double>(hits) / static_cast<double>(data.rows);
    return ev;
}

}  // namespace mint::nn
