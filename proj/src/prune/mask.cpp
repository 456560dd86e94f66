#include "mint/prune/mask.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mint/error.hpp"

namespace mint::prune {

LayerMask LayerMask::all_ones(std::string name, std::size_t rows, std::size_t cols) {
    LayerMask m;
    m.name = std::move(name);
    m.rows = rows;
    m.cols = cols;
    m.keep.assign(rows * cols, 1);
    return m;
}

std::size_t LayerMask::zero_count() const {
    return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), std::uint8_t{0}));
}

LayerMask masks_from_retained(const RetainedSets& retained, const Grouping& consumer,
                              const Grouping& producer) {
    if (retained.size() != consumer.group_count()) {
        throw ShapeError("retained sets do not match the consumer grouping");
    }
    LayerMask mask;
    mask.rows = consumer.filter_count();
    mask.cols = producer.filter_count();
    mask.consumer_groups = consumer.group_count();
    mask.producer_groups = producer.group_count();
    mask.keep.assign(mask.rows * mask.cols, 0);
    for (std::size_t i = 0; i < retained.size(); ++i) {
        const auto& rows = consumer.range(i);
        for (std::size_t j : retained[i]) {
            if (j >= producer.group_count()) throw ShapeError("retained set names an unknown group");
            const auto& cols = producer.range(j);
            for (std::size_t r = rows.begin; r < rows.end; ++r) {
                std::fill_n(mask.keep.begin() + static_cast<std::ptrdiff_t>(r * mask.cols + cols.begin),
                            cols.size(), std::uint8_t{1});
            }
        }
    }
    return mask;
}

RetainedSets retained_from_mask(const LayerMask& mask, const Grouping& consumer,
                                const Grouping& producer) {
    if (mask.rows != consumer.filter_count() || mask.cols != producer.filter_count()) {
        throw ShapeError("mask shape does not match the groupings");
    }
    RetainedSets retained(consumer.group_count());
    for (std::size_t i = 0; i < consumer.group_count(); ++i) {
        const std::size_t r = consumer.range(i).begin;
        for (std::size_t j = 0; j < producer.group_count(); ++j) {
            if (mask.at(r, producer.range(j).begin)) retained[i].push_back(j);
        }
    }
    return retained;
}

namespace {

void check_pair(const std::vector<LayerShape>& shapes, const PairScores& pair, std::size_t p) {
    if (p + 1 >= shapes.size()) throw ShapeError("layer pair index beyond the model");
    const auto& producer = shapes[p];
    const auto& consumer = shapes[p + 1];
    if (pair.producer.filter_count() != producer.out || pair.producer.filter_count() != consumer.in ||
        pair.consumer.filter_count() != consumer.out) {
        throw ShapeError("pair " + std::to_string(p) + ": groupings do not match layer shapes");
    }
    if (pair.table.consumer_groups != pair.consumer.group_count() ||
        pair.table.producer_groups != pair.producer.group_count()) {
        throw ShapeError("pair " + std::to_string(p) + ": table shape does not match groupings");
    }
}

}  // namespace

PruneMask build_mask(const std::vector<LayerShape>& shapes, const std::vector<PairScores>& pairs,
                     const ThresholdPolicy& policy) {
    policy.validate();
    PruneMask mask;
    for (const auto& s : shapes) mask.layers.push_back(LayerMask::all_ones(s.name, s.out, s.in));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& pair = pairs[p];
        check_pair(shapes, pair, p);
        auto& layer = mask.layers[p + 1];
        layer.consumer_groups = pair.consumer.group_count();
        layer.producer_groups = pair.producer.group_count();
        if (policy.skip_pairs.count(p)) continue;
        const double effective = gamma_cap(pair.table, policy.delta, policy.gamma);
        auto expanded = masks_from_retained(apply_threshold(pair.table, effective), pair.consumer,
                                            pair.producer);
        layer.keep = std::move(expanded.keep);
        layer.delta = effective;
    }
    return mask;
}

double scored_pruned_fraction(const PruneMask& mask, const std::vector<LayerShape>& shapes,
                              const std::vector<PairScores>& pairs,
                              const std::set<std::size_t>& skip_pairs) {
    std::size_t total = 0;
    std::size_t zeroed = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (skip_pairs.count(p)) continue;
        const auto& shape = shapes.at(p + 1);
        total += shape.weight_count();
        zeroed += mask.layers.at(p + 1).zero_count() * shape.kernel;
    }
    return total == 0 ? 0.0 : static_cast<double>(zeroed) / static_cast<double>(total);
}

DeltaSolution solve_delta_for_sparsity(const std::vector<LayerShape>& shapes,
                                       const std::vector<PairScores>& pairs, double target,
                                       double gamma, const std::set<std::size_t>& skip_pairs) {
    if (!(target >= 0.0 && target < 1.0)) throw DomainError("target sparsity must lie in [0, 1)");

    auto fraction_at = [&](double delta) {
        ThresholdPolicy policy{delta, gamma, skip_pairs};
        return scored_pruned_fraction(build_mask(shapes, pairs, policy), shapes, pairs, skip_pairs);
    };

    DeltaSolution out;
    double lo = 0.0;
    double hi = 1.0;
    if (fraction_at(hi) <= target) {
        lo = hi;
    } else {
        for (int iter = 0; iter < 48; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (fraction_at(mid) <= target ? lo : hi) = mid;
        }
    }

    // Pruned sets only change when delta crosses a score, so the smallest
    // score >= lo gives the same mask with a readable threshold.
    double snapped = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (skip_pairs.count(p)) continue;
        for (const auto& s : pairs[p].table.scores) {
            if (s.value >= lo && s.value < snapped) snapped = s.value;
        }
    }
    const double base = fraction_at(lo);
    out.delta = snapped <= 1.0 && fraction_at(snapped) == base ? snapped : lo;
    out.mask = build_mask(shapes, pairs, ThresholdPolicy{out.delta, gamma, skip_pairs});
    out.achieved = scored_pruned_fraction(out.mask, shapes, pairs, skip_pairs);
    out.unreachable = lo == 1.0 && out.achieved < target;
    return out;
}

}  // namespace mint::prune
