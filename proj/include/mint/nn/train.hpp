#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mint/nn/dataset.hpp"
#include "mint/nn/model.hpp"
#include "mint/prune/mask.hpp"

namespace mint::nn {

/// SGD with momentum and L2 weight decay; lr is multiplied by lr_multiplier
/// at the start of each milestone epoch (0-based). Defaults are the MLP
/// training setup (30 epochs, batch 256, lr 0.1, milestones 10/20, x0.1,
/// weight decay 1e-4); momentum 0.9 is our choice.
struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 256;
    double learning_rate = 0.1;
    std::vector<std::size_t> milestones{10, 20};
    double lr_multiplier = 0.1;
    double weight_decay = 1e-4;
    double momentum = 0.9;
    std::uint64_t seed = 0;

    void validate() const;
    double learning_rate_at(std::size_t epoch) const;
    bool operator==(const TrainConfig&) const = default;
};

struct EpochStats {
    std::size_t epoch = 0;
    double learning_rate = 0.0;
    double loss = 0.0;      // mean cross-entropy over the epoch's batches
    double accuracy = 0.0;  // running training accuracy
};

struct TrainResult {
    MlpModel model;
    std::vector<EpochStats> trace;
};

/// Called after every epoch with the current parameters.
using EpochObserver = std::function<void(std::size_t epoch, const MlpModel& model)>;

TrainResult train(const MlpModel& model, const Dataset& data, const TrainConfig& config,
                  const EpochObserver& observer = {});

/// Same procedure as train, but masked gradients are zeroed before each update
/// and masked weights are re-zeroed after it.
TrainResult retrain_masked(const MlpModel& model, const prune::PruneMask& mask, const Dataset& data,
                           const TrainConfig& config, const EpochObserver& observer = {});

/// Mean cross-entropy and its gradients for one batch.
struct Gradients {
    double loss = 0.0;
    std::size_t hits = 0;  // rows whose argmax equals the target
    std::vector<MatrixD> weights;
    std::vector<VectorD> biases;
    MatrixD inputs;  // d loss / d inputs, filled on request
};

Gradients loss_and_gradients(const Network64& net, const MatrixD& inputs,
                             std::span<const std::uint32_t> targets, bool input_gradient = false);

struct Evaluation {
    double accuracy = 0.0;
    std::vector<double> confidences;  // max class probability per row
    std::vector<std::uint32_t> predictions;
    std::vector<bool> correct;
};

Evaluation evaluate(const MlpModel& model, const Dataset& data);

}  // namespace mint::nn
