#pragma once

#include <cstddef>
#include <vector>

#include "mint/gmi/sample_matrix.hpp"

namespace mint::prune {

/// Sequential grouping of a layer's N filters into G consecutive ranges.
/// The first G-1 ranges hold floor(N/G) filters; the last takes the rest.
class Grouping {
public:
    Grouping() = default;
    Grouping(std::size_t filters, std::size_t groups);

    std::size_t filter_count() const { return filters_; }
    std::size_t group_count() const { return ranges_.size(); }
    const std::vector<gmi::ColumnRange>& ranges() const { return ranges_; }
    const gmi::ColumnRange& range(std::size_t g) const { return ranges_.at(g); }
    std::size_t group_of(std::size_t filter) const;

    bool operator==(const Grouping&) const = default;

private:
    std::size_t filters_ = 0;
    std::vector<gmi::ColumnRange> ranges_;
};

/// Throws InvalidGrouping unless 1 <= groups <= filters.
Grouping group_filters(std::size_t filters, std::size_t groups);

}  // namespace mint::prune
