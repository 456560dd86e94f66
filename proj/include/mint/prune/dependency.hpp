#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mint/gmi/estimator.hpp"
#include "mint/gmi/sample_matrix.hpp"
#include "mint/prune/grouping.hpp"

namespace mint::prune {

/// rho scores for one layer pair (l, l+1): rows are consumer groups of layer
/// l+1, columns are producer groups of layer l.
struct DependencyTable {
    std::size_t pair_index = 0;  // l
    std::size_t consumer_groups = 0;
    std::size_t producer_groups = 0;
    std::vector<gmi::DependencyScore> scores;  // row-major

    const gmi::DependencyScore& at(std::size_t i, std::size_t j) const {
        return scores[i * producer_groups + j];
    }
    double value(std::size_t i, std::size_t j) const { return at(i, j).value; }
    std::size_t size() const { return scores.size(); }

    bool operator==(const DependencyTable&) const = default;
};

/// Seed of cell (i, j) in pair l: derive_seed(master, {l, i, j}).
std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t pair_index, std::size_t consumer_group,
                        std::size_t producer_group);

/// Scores every (consumer group i, producer group j) cell as the conditional
/// GMI of producer group j and consumer group i given the remaining producer
/// filters (plain GMI when the producer has a single group). `threads` > 1
/// splits cells over worker threads; results are identical to sequential.
DependencyTable compute_dependency_table(const gmi::SampleMatrix& producer_acts,
                                         const gmi::SampleMatrix& consumer_acts,
                                         const Grouping& producer, const Grouping& consumer,
                                         std::size_t pair_index, std::uint64_t master_seed,
                                         unsigned threads = 1);

}  // namespace mint::prune
