#include "mint/characterize/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "mint/error.hpp"

namespace mint::characterize {

ReliabilityProfile ece(std::span<const double> confidences, const std::vector<bool>& correct,
                       std::size_t bin_count) {
    if (confidences.empty()) throw DomainError("ece: no samples");
    if (confidences.size() != correct.size()) throw ShapeError("ece: confidences and correctness differ in length");
    if (bin_count == 0) throw DomainError("ece: bin_count must be at least 1");

    ReliabilityProfile p;
    p.samples = confidences.size();
    p.bins.resize(bin_count);
    const double b = static_cast<double>(bin_count);
    std::vector<double> conf_sum(bin_count, 0.0);
    std::vector<std::size_t> hits(bin_count, 0);
    for (std::size_t i = 0; i < confidences.size(); ++i) {
        const double c = confidences[i];
        if (!(c >= 0.0 && c <= 1.0)) throw DomainError("ece: confidence outside [0, 1]");
        const auto raw = static_cast<long long>(std::ceil(c * b)) - 1;
        const auto k = static_cast<std::size_t>(std::clamp<long long>(raw, 0, static_cast<long long>(bin_count) - 1));
        ++p.bins[k].count;
        conf_sum[k] += c;
        hits[k] += correct[i];
    }
    for (std::size_t k = 0; k < bin_count; ++k) {
        auto& bin = p.bins[k];
        bin.lower = static_cast<double>(k) / b;
        bin.upper = static_cast<double>(k + 1) / b;
        if (bin.count == 0) continue;
        const double n = static_cast<double>(bin.count);
        bin.mean_confidence = conf_sum[k] / n;
        bin.accuracy = static_cast<double>(hits[k]) / n;
        p.ece += n / static_cast<double>(p.samples) * std::abs(bin.accuracy - bin.mean_confidence);
    }
    return p;
}

}  // namespace mint::characterize
