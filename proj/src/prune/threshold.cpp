#include "mint/prune/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "mint/error.hpp"

namespace mint::prune {

void ThresholdPolicy::validate() const {
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
}

RetainedSets apply_threshold(const DependencyTable& table, double delta) {
    RetainedSets kept(table.consumer_groups);
    for (std::size_t i = 0; i < table.consumer_groups; ++i) {
        for (std::size_t j = 0; j < table.producer_groups; ++j) {
            if (table.value(i, j) >= delta) kept[i].push_back(j);
        }
    }
    return kept;
}

std::size_t pruned_cells(const DependencyTable& table, double delta) {
    return static_cast<std::size_t>(std::count_if(
        table.scores.begin(), table.scores.end(),
        [delta](const gmi::DependencyScore& s) { return s.value < delta; }));
}

double gamma_cap(const DependencyTable& table, double delta, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
    const std::size_t cells = table.size();
    if (cells == 0) return delta;
    // The epsilon keeps products such as 0.5 * 10 from landing just below an integer.
    const auto cap = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(cells) + 1e-9));
    if (pruned_cells(table, delta) <= cap) return delta;

    std::vector<double> sorted;
    sorted.reserve(cells);
    for (const auto& s : table.scores) sorted.push_back(s.value);
    std::sort(sorted.begin(), sorted.end());

    // Candidate k prunes exactly the cells before the first occurrence of sorted[k].
    double chosen = sorted.front();
    for (std::size_t k = 0; k < cells; ++k) {
        if (k > 0 && sorted[k] == sorted[k - 1]) continue;
        if (k > cap) break;
        chosen = sorted[k];
    }
    return chosen;
}

}  // namespace mint::prune
