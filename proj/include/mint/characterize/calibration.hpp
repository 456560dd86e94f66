#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mint::characterize {

struct ReliabilityBin {
    double lower = 0.0;  // bin covers (lower, upper]
    double upper = 0.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double accuracy = 0.0;
};

struct ReliabilityProfile {
    std::vector<ReliabilityBin> bins;
    std::size_t samples = 0;
    double ece = 0.0;
};

/// Equal-width bins over (0, 1]; confidence c lands in bin ceil(c * B) - 1,
/// with c = 0 sent to the first bin. ECE = sum_b (n_b / n) |acc_b - conf_b|.
ReliabilityProfile ece(std::span<const double> confidences, const std::vector<bool>& correct,
                       std::size_t bin_count = 10);

}  // namespace mint::characterize
