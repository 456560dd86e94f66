#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mint/prune/mask.hpp"

namespace mint::prune {

struct LayerSparsity {
    std::string name;
    std::size_t weights = 0;  // kernel entries included
    std::size_t zeroed = 0;
    std::size_t biases = 0;

    // Zeroed share of this layer's weights (biases excluded).
    double pruned_fraction() const {
        return weights == 0 ? 0.0 : static_cast<double>(zeroed) / static_cast<double>(weights);
    }
};

struct SparsityReport {
    std::vector<LayerSparsity> layers;
    std::size_t total_weights = 0;
    std::size_t total_zeroed = 0;
    std::size_t total_biases = 0;

    // Zeroed weights over every parameter, biases included in the denominator.
    double total_fraction() const;
    // Zeroed weights over weights only.
    double weight_fraction() const;
};

/// Parameter accounting of a mask applied to layers of the given shapes.
SparsityReport sparsity_report(const PruneMask& mask, const std::vector<LayerShape>& shapes);

}  // namespace mint::prune
