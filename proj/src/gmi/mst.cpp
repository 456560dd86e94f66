#include "mint/gmi/mst.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <limits>
#include <tuple>

#include "mint/error.hpp"

namespace mint::gmi {

namespace {

struct Candidate {
    double weight = std::numeric_limits<double>::infinity();
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    std::size_t hi = std::numeric_limits<std::size_t>::max();

    bool operator<(const Candidate& o) const {
        return std::tie(weight, lo, hi) < std::tie(o.weight, o.lo, o.hi);
    }
};

}  // namespace

double EdgeList::total_weight() const {
    std::vector<double> w;
    w.reserve(edges.size());
    for (const auto& e : edges) w.push_back(e.weight);
    std::sort(w.begin(), w.end());
    double total = 0.0;
    for (double v : w) total += v;
    return total;
}

double euclidean_distance(std::span<const double> p, std::span<const double> q) {
    using Vec = Eigen::Map<const Eigen::VectorXd>;
    const auto n = static_cast<Eigen::Index>(p.size());
    return (Vec(p.data(), n) - Vec(q.data(), n)).norm();
}

EdgeList euclidean_mst(const SampleMatrix& points) {
    const std::size_t m = points.rows();
    if (m < 2) throw InsufficientSamples("euclidean_mst: need at least 2 points");

    EdgeList tree;
    tree.node_count = m;
    tree.edges.reserve(m - 1);

    std::vector<Candidate> best(m);
    std::vector<bool> in_tree(m, false);
    std::size_t current = 0;
    in_tree[0] = true;

    for (std::size_t step = 1; step < m; ++step) {
        auto anchor = points.row(current);
        Candidate pick;
        std::size_t next = m;
        for (std::size_t v = 0; v < m; ++v) {
            if (in_tree[v]) continue;
            Candidate c{euclidean_distance(anchor, points.row(v)), std::min(current, v),
                        std::max(current, v)};
            if (c < best[v]) best[v] = c;
            if (best[v] < pick) {
                pick = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        tree.edges.push_back({pick.lo, pick.hi, pick.weight});
        current = next;
    }
    return tree;
}

std::size_t fr_statistic(const EdgeList& tree, std::span<const Origin> origins) {
    if (origins.size() != tree.node_count) {
        throw ShapeError("fr_statistic: label count does not match tree size");
    }
    const bool has_joint = std::find(origins.begin(), origins.end(), Origin::joint) != origins.end();
    const bool has_surrogate =
        std::find(origins.begin(), origins.end(), Origin::surrogate) != origins.end();
    if (!has_joint || !has_surrogate) {
        throw DegenerateLabels("fr_statistic: both origin tags must be present");
    }
    std::size_t count = 0;
    for (const auto& e : tree.edges) count += origins[e.a] != origins[e.b] ? 1 : 0;
    return count;
}

}  // namespace mint::gmi
