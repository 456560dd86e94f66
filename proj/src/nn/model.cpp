#include "mint/nn/model.hpp"

#include <cmath>
#include <random>

#include "mint/error.hpp"
#include "mint/random.hpp"

namespace mint::nn {

MlpModel::MlpModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { validate(); }

MlpModel MlpModel::create(std::span<const std::size_t> widths, std::uint64_t seed) {
    if (widths.size() < 2) throw ShapeError("model needs at least an input and an output width");
    std::vector<DenseLayer> layers;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        DenseLayer layer;
        layer.in = widths[k];
        layer.out = widths[k + 1];
        if (layer.in == 0 || layer.out == 0) throw ShapeError("layer widths must be positive");
        layer.activation = k + 2 == widths.size() ? Activation::softmax : Activation::relu;
        Rng rng(derive_seed(seed, {k}));
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
        std::uniform_real_distribution<double> init(-limit, limit);
        layer.weights.resize(layer.out * layer.in);
        for (auto& w : layer.weights) w = static_cast<float>(init(rng));
        layer.bias.assign(layer.out, 0.0f);
        layers.push_back(std::move(layer));
    }
    return MlpModel(std::move(layers));
}

std::string MlpModel::layer_name(std::size_t k) { return "fc" + std::to_string(k + 1); }

std::vector<prune::LayerShape> MlpModel::shapes() const {
    std::vector<prune::LayerShape> out;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        out.push_back({layer_name(k), layers_[k].out, layers_[k].in, 1});
    }
    return out;
}

void MlpModel::validate() const {
    if (layers_.empty()) throw ShapeError("model has no layers");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const auto& l = layers_[k];
        if (l.weights.size() != l.out * l.in || l.bias.size() != l.out) {
            throw ShapeError("layer " + layer_name(k) + ": parameter sizes do not match its shape");
        }
        if (k > 0 && l.in != layers_[k - 1].out) {
            throw ShapeError("layer " + layer_name(k) + ": input width does not chain");
        }
        const bool last = k + 1 == layers_.size();
        if (l.activation == Activation::softmax && !last) {
            throw ShapeError("softmax is only allowed on the output layer");
        }
        for (float w : l.weights)
            if (!std::isfinite(w)) throw DomainError("non-finite weight in " + layer_name(k));
        for (float b : l.bias)
            if (!std::isfinite(b)) throw DomainError("non-finite bias in " + layer_name(k));
    }
}

Network64 Network64::from(const MlpModel& model) {
    using FloatMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Network64 net;
    for (const auto& layer : model.layers()) {
        const auto out = static_cast<Eigen::Index>(layer.out);
        const auto in = static_cast<Eigen::Index>(layer.in);
        net.weights.push_back(Eigen::Map<const FloatMat>(layer.weights.data(), out, in).cast<double>());
        net.biases.push_back(Eigen::Map<const Eigen::VectorXf>(layer.bias.data(), out).cast<double>());
        net.activations.push_back(layer.activation);
    }
    return net;
}

ForwardResult forward(const Network64& net, const MatrixD& inputs) {
    if (static_cast<std::size_t>(inputs.cols()) != net.input_width()) {
        throw ShapeError("forward: batch width " + std::to_string(inputs.cols()) +
                         " does not match model input " + std::to_string(net.input_width()));
    }
    ForwardResult result;
    result.activations.reserve(net.weights.size());
    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        const MatrixD& prev = k == 0 ? inputs : result.activations.back();
        MatrixD z = prev * net.weights[k].transpose();
        z.rowwise() += net.biases[k].transpose();
        if (net.activations[k] == Activation::relu) {
            z = z.cwiseMax(0.0);
        } else {
            for (Eigen::Index r = 0; r < z.rows(); ++r) {
                auto row = z.row(r);
                row.array() -= row.maxCoeff();
                row = row.array().exp().matrix();
                row /= row.sum();
            }
        }
        result.activations.push_back(std::move(z));
    }
    return result;
}

ForwardResult forward(const MlpModel& model, const MatrixD& inputs) {
    return forward(Network64::from(model), inputs);
}

MlpModel apply_mask(const MlpModel& model, const prune::PruneMask& mask) {
    if (mask.layers.size() != model.layer_count()) throw ShapeError("mask layer count differs from model");
    MlpModel out = model;
    for (std::size_t k = 0; k < model.layer_count(); ++k) {
        auto& layer = out.layers()[k];
        const auto& m = mask.layers[k];
        if (m.rows != layer.out || m.cols != layer.in) {
            throw ShapeError("mask for " + MlpModel::layer_name(k) + " does not match the weight shape");
        }
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            if (!m.keep[i]) layer.weights[i] = 0.0f;
        }
    }
    return out;
}

prune::PruneMask zero_pattern(const MlpModel& model) {
    prune::PruneMask mask;
    for (std::size_t k = 0; k < model.layer_count(); ++k) {
        const auto& layer = model.layers()[k];
        auto m = prune::LayerMask::all_ones(MlpModel::layer_name(k), layer.out, layer.in);
        for (std::size_t i = 0; i < layer.weights.size(); ++i) m.keep[i] = layer.weights[i] != 0.0f;
        mask.layers.push_back(std::move(m));
    }
    return mask;
}

}  // namespace mint::nn
