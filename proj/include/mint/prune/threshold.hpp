#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "mint/prune/dependency.hpp"

namespace mint::prune {

/// Global threshold, per-pair prune cap, and layer pairs left untouched.
struct ThresholdPolicy {
    double delta = 0.0;
    double gamma = 1.0;
    std::set<std::size_t> skip_pairs;

    void validate() const;
};

/// For each consumer group i, the producer groups j it keeps (sorted).
using RetainedSets = std::vector<std::vector<std::size_t>>;

/// S_i = { j : rho[i][j] >= delta }.
RetainedSets apply_threshold(const DependencyTable& table, double delta);

/// Number of cells with rho < delta.
std::size_t pruned_cells(const DependencyTable& table, double delta);

/// Effective threshold for one pair. When thresholding at delta would prune
/// more than gamma of the pair's cells, returns the largest score value whose
/// pruned count (cells strictly below it) is at most floor(gamma * K); equal
/// scores are kept or dropped together. Otherwise returns delta unchanged.
double gamma_cap(const DependencyTable& table, double delta, double gamma);

}  // namespace mint::prune
