#include "mint/prune/grouping.hpp"

#include <string>

#include "mint/error.hpp"

namespace mint::prune {

Grouping::Grouping(std::size_t filters, std::size_t groups) : filters_(filters) {
    if (groups == 0 || groups > filters) {
        throw InvalidGrouping("cannot split " + std::to_string(filters) + " filters into " +
                              std::to_string(groups) + " groups");
    }
    const std::size_t width = filters / groups;
    ranges_.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t begin = g * width;
        const std::size_t end = g + 1 == groups ? filters : begin + width;
        ranges_.push_back({begin, end});
    }
}

std::size_t Grouping::group_of(std::size_t filter) const {
    if (filter >= filters_) throw InvalidGrouping("filter index out of range");
    const std::size_t width = filters_ / ranges_.size();
    return std::min(filter / width, ranges_.size() - 1);
}

Grouping group_filters(std::size_t filters, std::size_t groups) { return Grouping(filters, groups); }

}  // namespace mint::prune
