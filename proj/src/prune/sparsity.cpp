#include "mint/prune/sparsity.hpp"

#include "mint/error.hpp"

namespace mint::prune {

double SparsityReport::total_fraction() const {
    const std::size_t params = total_weights + total_biases;
    return params == 0 ? 0.0 : static_cast<double>(total_zeroed) / static_cast<double>(params);
}

double SparsityReport::weight_fraction() const {
    return total_weights == 0 ? 0.0
                              : static_cast<double>(total_zeroed) / static_cast<double>(total_weights);
}

SparsityReport sparsity_report(const PruneMask& mask, const std::vector<LayerShape>& shapes) {
    if (mask.layers.size() != shapes.size()) throw ShapeError("mask and model layer counts differ");
    SparsityReport report;
    for (std::size_t k = 0; k < shapes.size(); ++k) {
        const auto& shape = shapes[k];
        const auto& layer = mask.layers[k];
        if (layer.rows != shape.out || layer.cols != shape.in) {
            throw ShapeError("mask layer " + layer.name + " does not match its weight shape");
        }
        LayerSparsity s{shape.name, shape.weight_count(), layer.zero_count() * shape.kernel, shape.out};
        report.total_weights += s.weights;
        report.total_zeroed += s.zeroed;
        report.total_biases += s.biases;
        report.layers.push_back(std::move(s));
    }
    return report;
}

}  // namespace mint::prune
