#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mint/prune/mask.hpp"

namespace mint::nn {

using MatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorD = Eigen::VectorXd;

enum class Activation : std::uint8_t { relu = 0, softmax = 1 };

/// y = act(W x + b) with W stored row-major as out x in float32.
struct DenseLayer {
    std::size_t out = 0;
    std::size_t in = 0;
    Activation activation = Activation::relu;
    std::vector<float> weights;
    std::vector<float> bias;

    float& weight(std::size_t r, std::size_t c) { return weights[r * in + c]; }
    float weight(std::size_t r, std::size_t c) const { return weights[r * in + c]; }
    bool operator==(const DenseLayer&) const = default;
};

/// Feed-forward stack of dense layers; relu hidden layers, softmax output.
class MlpModel {
public:
    MlpModel() = default;
    explicit MlpModel(std::vector<DenseLayer> layers);

    /// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
    /// widths = {inputs, hidden..., classes}.
    static MlpModel create(std::span<const std::size_t> widths, std::uint64_t seed);

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    std::size_t layer_count() const { return layers_.size(); }
    std::size_t input_width() const { return layers_.empty() ? 0 : layers_.front().in; }
    std::size_t output_width() const { return layers_.empty() ? 0 : layers_.back().out; }

    /// "fc1", "fc2", ...
    static std::string layer_name(std::size_t k);
    std::vector<prune::LayerShape> shapes() const;

    /// Chaining, activation placement and finiteness; throws ShapeError/DomainError.
    void validate() const;

    bool operator==(const MlpModel&) const = default;

private:
    std::vector<DenseLayer> layers_;
};

/// Per-layer post-activation outputs; the last entry holds class probabilities.
struct ForwardResult {
    std::vector<MatrixD> activations;
    const MatrixD& probabilities() const { return activations.back(); }
};

/// Float64 copy of a model's parameters for forward/backward passes.
struct Network64 {
    std::vector<MatrixD> weights;
    std::vector<VectorD> biases;
    std::vector<Activation> activations;

    static Network64 from(const MlpModel& model);
    std::size_t input_width() const { return weights.empty() ? 0 : static_cast<std::size_t>(weights.front().cols()); }
};

/// Batch forward pass in float64. `inputs` is batch x input_width.
ForwardResult forward(const Network64& net, const MatrixD& inputs);
ForwardResult forward(const MlpModel& model, const MatrixD& inputs);

/// Zeroes masked weights; retained weights and all biases are untouched.
MlpModel apply_mask(const MlpModel& model, const prune::PruneMask& mask);

/// Mask of the current zero pattern (1 where a weight is nonzero).
prune::PruneMask zero_pattern(const MlpModel& model);

}  // namespace mint::nn
