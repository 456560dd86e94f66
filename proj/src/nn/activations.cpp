#include "mint/nn/activations.hpp"

#include <algorithm>

#include "mint/error.hpp"
#include "mint/random.hpp"

namespace mint::nn {

const LayerActivations& ActivationDump::layer(const std::string& name) const {
    for (const auto& l : layers)
        if (l.name == name) return l;
    throw ShapeError("activation dump has no layer '" + name + "'");
}

void ActivationDump::validate() const {
    for (const auto& l : layers) {
        if (l.values.rows() != labels.size()) {
            throw ShapeError("layer '" + l.name + "' has " + std::to_string(l.values.rows()) +
                             " rows but the dump has " + std::to_string(labels.size()) + " labels");
        }
    }
}

std::vector<std::size_t> stratified_sample(const Dataset& data, std::size_t m_per_class,
                                           std::uint64_t seed) {
    if (m_per_class == 0) throw DomainError("m_per_class must be at least 1");
    std::vector<std::vector<std::size_t>> members(data.classes);
    for (std::size_t r = 0; r < data.rows; ++r) members.at(data.labels[r]).push_back(r);
    std::vector<std::size_t> picked;
    picked.reserve(m_per_class * data.classes);
    for (std::size_t k = 0; k < data.classes; ++k) {
        auto& m = members[k];
        if (m.size() < m_per_class) {
            throw SamplingError("class " + std::to_string(k) + " has " + std::to_string(m.size()) +
                                " samples, fewer than m_per_class = " + std::to_string(m_per_class));
        }
        Rng rng(derive_seed(seed, {k}));
        std::shuffle(m.begin(), m.end(), rng);
        picked.insert(picked.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(m_per_class));
    }
    return picked;
}

ActivationDump capture_activations(const MlpModel& model, const Dataset& data,
                                   std::size_t m_per_class, std::uint64_t seed, bool include_input) {
    data.validate();
    if (data.dims != model.input_width()) throw ShapeError("dataset width does not match the model input");
    const auto idx = stratified_sample(data, m_per_class, seed);

    ActivationDump dump;
    dump.m_per_class = m_per_class;
    dump.seed = seed;
    for (std::size_t i : idx) dump.labels.push_back(data.labels[i]);

    const MatrixD inputs = data.batch(idx);
    if (include_input) {
        std::vector<double> values(inputs.data(), inputs.data() + inputs.size());
        dump.layers.push_back({"input", gmi::SampleMatrix(idx.size(), data.dims, std::move(values))});
    }
    const auto fw = forward(model, inputs);
    for (std::size_t k = 0; k < fw.activations.size(); ++k) {
        const MatrixD& a = fw.activations[k];
        std::vector<double> values(static_cast<std::size_t>(a.size()));
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = static_cast<double>(static_cast<float>(a.data()[i]));
        }
        dump.layers.push_back({MlpModel::layer_name(k),
                               gmi::SampleMatrix(static_cast<std::size_t>(a.rows()),
                                                 static_cast<std::size_t>(a.cols()), std::move(values))});
    }
    return dump;
}

std::vector<double> spatial_average(std::span<const float> maps, std::size_t channels,
                                    std::size_t spatial) {
    if (spatial == 0 || maps.size() != channels * spatial) throw ShapeError("spatial_average: size mismatch");
    std::vector<double> out(channels, 0.0);
    for (std::size_t c = 0; c < channels; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < spatial; ++i) s += maps[c * spatial + i];
        out[c] = s / static_cast<double>(spatial);
    }
    return out;
}

}  // namespace mint::nn
