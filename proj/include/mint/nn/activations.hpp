#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mint/gmi/sample_matrix.hpp"
#include "mint/nn/dataset.hpp"
#include "mint/nn/model.hpp"

namespace mint::nn {

/// Post-activation samples of one layer, one column per filter. Values are
/// float32-representable so dumps survive a MINTACT1 round trip unchanged.
struct LayerActivations {
    std::string name;
    gmi::SampleMatrix values;
    bool operator==(const LayerActivations&) const = default;
};

struct ActivationDump {
    std::vector<LayerActivations> layers;
    std::vector<std::uint32_t> labels;  // one per row, shared by all layers
    std::size_t m_per_class = 0;        // 0 when unknown (e.g. read from disk)
    std::uint64_t seed = 0;

    std::size_t rows() const { return labels.size(); }
    const LayerActivations& layer(const std::string& name) const;
    /// Equal row counts across layers and labels; throws ShapeError.
    void validate() const;
    bool operator==(const ActivationDump&) const = default;
};

/// Rows of class k are data rows of class k shuffled with derive_seed(seed, {k})
/// and truncated to m_per_class; classes are stacked in label order.
std::vector<std::size_t> stratified_sample(const Dataset& data, std::size_t m_per_class,
                                           std::uint64_t seed);

/// One forward pass over the stratified sample, capturing every layer. With
/// include_input the raw features come first as a layer named "input".
ActivationDump capture_activations(const MlpModel& model, const Dataset& data,
                                   std::size_t m_per_class, std::uint64_t seed, bool include_input = false);

/// Mean over a filter's spatial positions. `maps` is channels x (h*w), row-major;
/// returns one value per channel. Dense layers have h*w = 1 so this is the identity.
std::vector<double> spatial_average(std::span<const float> maps, std::size_t channels,
                                    std::size_t spatial);

}  // namespace mint::nn
