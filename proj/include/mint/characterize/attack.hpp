#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mint/nn/dataset.hpp"
#include "mint/nn/model.hpp"

namespace mint::characterize {

enum class AttackMode { untargeted_fgsm, least_likely };

struct AttackConfig {
    double epsilon = 0.0;
    std::size_t steps = 10;
    double step_size = 0.0;  // 0: epsilon / steps
    AttackMode mode = AttackMode::untargeted_fgsm;

    void validate() const;
    double effective_step() const { return step_size > 0.0 ? step_size : epsilon / static_cast<double>(steps); }
};

/// Iterative sign-gradient attack. Untargeted steps ascend the true-class
/// cross-entropy; least-likely steps descend the loss of the class the clean
/// input ranks lowest. After every step the input is clipped to the
/// epsilon-ball around the original and to [0, 1].
nn::MatrixD iterative_attack(const nn::MlpModel& model, const nn::MatrixD& inputs,
                             std::span<const std::uint32_t> labels, const AttackConfig& config);

struct CurvePoint {
    double epsilon = 0.0;
    double accuracy = 0.0;
};

/// Accuracy under attack for each epsilon on a seeded subset of at most
/// `samples` rows (the same rows for every epsilon).
std::vector<CurvePoint> attack_curve(const nn::MlpModel& model, const nn::Dataset& data,
                                     std::span<const double> epsilons, AttackConfig config,
                                     std::size_t samples, std::uint64_t seed);

}  // namespace mint::characterize
