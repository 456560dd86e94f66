#pragma once

#include <cstddef>
#include <cstdint>

#include "mint/gmi/sample_matrix.hpp"

namespace mint::gmi {

/// Estimated (conditional) geometric mutual information.
///
/// `value` is clamp(1 - R/n, 0, 1) where R is the Friedman-Rafsky count on the
/// merged set and n the size of each half. `raw_fr_count` and `subset_size`
/// are kept so a caller can recover other normalizations, e.g. 1 - R/(2n).
struct DependencyScore {
    double value = 0.0;
    std::size_t raw_fr_count = 0;
    std::size_t subset_size = 0;

    bool operator==(const DependencyScore&) const = default;
};

/// Per-column zero mean and unit population standard deviation.
/// Zero-variance columns become all-zero.
SampleMatrix standardize(const SampleMatrix& samples);

/// Replaces each row's Y block by the Y block of its nearest neighbour in Z
/// (Euclidean, self excluded, ties to the lowest row index). X and Z are
/// copied bit-exactly. The result does not depend on `seed`; the parameter
/// keeps the signature aligned with permute_product.
SampleMatrix nn_bootstrap(const SampleMatrix& s2, const BlockSpec& spec, std::uint64_t seed);

/// Seeded uniform permutation of the Y block across rows; X and Z untouched.
SampleMatrix permute_product(const SampleMatrix& s2, const BlockSpec& spec, std::uint64_t seed);

/// Unconditional GMI of X and Y (spec.z must be empty). The surrogate half is
/// a Y-permutation and the MST spans the (X, Y) columns.
DependencyScore gmi(const SampleMatrix& samples, const BlockSpec& spec, std::uint64_t seed);

/// Conditional GMI of X and Y given Z (spec.z nonempty). The surrogate half
/// comes from nn_bootstrap and the MST spans (X, Y, Z).
DependencyScore conditional_gmi(const SampleMatrix& samples, const BlockSpec& spec,
                                std::uint64_t seed);

/// Dispatches to gmi or conditional_gmi on whether spec.z is empty.
DependencyScore estimate(const SampleMatrix& samples, const BlockSpec& spec, std::uint64_t seed);

/// Closed-form-free reference: GMI of a standard bivariate Gaussian with
/// correlation r, by midpoint quadrature on a grid x grid lattice over [-6,6]^2.
double gaussian_gmi_oracle(double r, std::size_t grid = 512);

}  // namespace mint::gmi
