#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mint/prune/dependency.hpp"
#include "mint/prune/grouping.hpp"
#include "mint/prune/threshold.hpp"

namespace mint::prune {

/// Weight-matrix geometry of one layer. `kernel` is the number of weights per
/// (output filter, input filter) connection: 1 for dense, kh*kw for conv.
struct LayerShape {
    std::string name;
    std::size_t out = 0;
    std::size_t in = 0;
    std::size_t kernel = 1;

    std::size_t weight_count() const { return out * in * kernel; }
    bool operator==(const LayerShape&) const = default;
};

/// Retain (1) / zero (0) decision per (consumer filter, producer filter).
struct LayerMask {
    std::string name;
    std::size_t rows = 0;  // consumer filters
    std::size_t cols = 0;  // producer filters
    std::size_t consumer_groups = 1;
    std::size_t producer_groups = 1;
    std::optional<double> delta;  // threshold applied; empty for unscored layers
    std::vector<std::uint8_t> keep;

    static LayerMask all_ones(std::string name, std::size_t rows, std::size_t cols);

    std::uint8_t at(std::size_t r, std::size_t c) const { return keep[r * cols + c]; }
    std::size_t zero_count() const;
    bool operator==(const LayerMask&) const = default;
};

/// One LayerMask per model layer, in model order.
struct PruneMask {
    std::vector<LayerMask> layers;
    bool operator==(const PruneMask&) const = default;
};

/// Block expansion of group decisions to filter granularity.
LayerMask masks_from_retained(const RetainedSets& retained, const Grouping& consumer,
                              const Grouping& producer);

/// Inverse of masks_from_retained on masks it produced.
RetainedSets retained_from_mask(const LayerMask& mask, const Grouping& consumer,
                                const Grouping& producer);

/// Scores and groupings for the pair whose consumer is model layer pair_index + 1.
struct PairScores {
    DependencyTable table;
    Grouping producer;
    Grouping consumer;
};

/// Full mask for a model: layer 0 and skipped pairs are all-ones; every other
/// layer p + 1 is thresholded at gamma_cap(table_p, delta, gamma).
PruneMask build_mask(const std::vector<LayerShape>& shapes, const std::vector<PairScores>& pairs,
                     const ThresholdPolicy& policy);

struct DeltaSolution {
    double delta = 0.0;
    double achieved = 0.0;     // pruned fraction over scored layers' weights
    bool unreachable = false;  // target above what delta in [0,1] can reach under gamma
    PruneMask mask;
};

/// Pruned fraction of the weights in scored (non-skipped, pair-governed) layers.
double scored_pruned_fraction(const PruneMask& mask, const std::vector<LayerShape>& shapes,
                              const std::vector<PairScores>& pairs,
                              const std::set<std::size_t>& skip_pairs);

/// 48-step bisection on delta in [0,1] for the largest pruned fraction not
/// exceeding `target`. The result is snapped to the score value where the
/// next jump happens, so the returned delta is an exact table entry when one
/// lies above the bracket.
DeltaSolution solve_delta_for_sparsity(const std::vector<LayerShape>& shapes,
                                       const std::vector<PairScores>& pairs, double target,
                                       double gamma, const std::set<std::size_t>& skip_pairs = {});

}  // namespace mint::prune
