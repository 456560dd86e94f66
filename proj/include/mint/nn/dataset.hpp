#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mint/nn/model.hpp"

namespace mint::nn {

/// m x d float32 features with one class index per row.
struct Dataset {
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::size_t classes = 0;
    std::vector<float> features;  // row-major
    std::vector<std::uint32_t> labels;

    std::span<const float> row(std::size_t r) const { return {features.data() + r * dims, dims}; }

    /// Selected rows as a float64 batch.
    MatrixD batch(std::span<const std::size_t> indices) const;
    MatrixD all() const;

    Dataset subset(std::span<const std::size_t> indices) const;
    std::vector<std::size_t> class_counts() const;

    /// Throws DomainError/ShapeError when sizes or labels are inconsistent.
    void validate() const;
};

/// K isotropic Gaussian blobs (std `spread`) centred on a circle of the given
/// radius in the first two coordinates; extra dimensions are centred at 0.
/// Rows are ordered class by class. Features are then min-max scaled into
/// [0, 1] over the whole set.
Dataset make_blobs(std::size_t classes, std::size_t per_class, std::size_t dims, double radius,
                   double spread, std::uint64_t seed);

/// Concentric 2-D rings: class k at radius k + 1, uniform angle, Gaussian
/// radial noise with std `noise`; scaled into [0, 1] like make_blobs.
Dataset make_rings(std::size_t classes, std::size_t per_class, double noise, std::uint64_t seed);

/// Seeded class-balanced split into (train, test) with test_per_class rows per class.
std::pair<Dataset, Dataset> split_per_class(const Dataset& data, std::size_t test_per_class,
                                            std::uint64_t seed);

}  // namespace mint::nn
