#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mint/gmi/sample_matrix.hpp"

namespace mint::gmi {

struct Edge {
    std::size_t a = 0;  // a < b
    std::size_t b = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

/// Spanning tree over node_count points, node_count - 1 edges.
struct EdgeList {
    std::vector<Edge> edges;
    std::size_t node_count = 0;

    /// Sum of edge weights taken in ascending weight order, so two trees with
    /// the same weight multiset report bit-identical totals.
    double total_weight() const;
};

/// Origin tag of a merged-set point: the joint half or the surrogate half.
enum class Origin : std::uint8_t { joint = 0, surrogate = 1 };

/// Euclidean distance between two equal-length rows.
double euclidean_distance(std::span<const double> p, std::span<const double> q);

/// Exact Euclidean MST by dense Prim, O(m^2 d). Candidate edges are ordered by
/// (weight, min index, max index), which makes the tree unique under ties.
EdgeList euclidean_mst(const SampleMatrix& points);

/// Number of tree edges joining points with different origin tags.
std::size_t fr_statistic(const EdgeList& tree, std::span<const Origin> origins);

}  // namespace mint::gmi
