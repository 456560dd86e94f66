#include "mint/characterize/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mint/error.hpp"
#include "mint/nn/train.hpp"
#include "mint/random.hpp"

namespace mint::characterize {

void AttackConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("attack epsilon must be non-negative");
    if (steps == 0) throw DomainError("attack steps must be at least 1");
    if (step_size < 0.0 || !std::isfinite(step_size)) throw DomainError("attack step_size must be positive");
}

nn::MatrixD iterative_attack(const nn::MlpModel& model, const nn::MatrixD& inputs,
                             std::span<const std::uint32_t> labels, const AttackConfig& config) {
    config.validate();
    if (static_cast<std::size_t>(inputs.rows()) != labels.size()) throw ShapeError("attack: one label per row required");
    if ((inputs.array() < 0.0).any() || (inputs.array() > 1.0).any()) throw DomainError("attack inputs must lie in [0, 1]");
    if (config.epsilon == 0.0) return inputs;

    const auto net = nn::Network64::from(model);
    std::vector<std::uint32_t> targets(labels.begin(), labels.end());
    double direction = 1.0;
    if (config.mode == AttackMode::least_likely) {
        const auto probs = nn::forward(net, inputs).probabilities();
        for (Eigen::Index r = 0; r < probs.rows(); ++r) {
            Eigen::Index arg = 0;
            probs.row(r).minCoeff(&arg);
            targets[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(arg);
        }
        direction = -1.0;
    }
    // Box bounds, nudged so that |bound - x| <= epsilon holds in floating point too.
    nn::MatrixD lo(inputs.rows(), inputs.cols()), hi(inputs.rows(), inputs.cols());
    for (Eigen::Index i = 0; i < inputs.size(); ++i) {
        const double x = inputs.data()[i];
        double l = x - config.epsilon, h = x + config.epsilon;
        while (x - l > config.epsilon) l = std::nextafter(l, x);
        while (h - x > config.epsilon) h = std::nextafter(h, x);
        lo.data()[i] = std::max(l, 0.0);
        hi.data()[i] = std::min(h, 1.0);
    }
    const double step = config.effective_step();

    nn::MatrixD adv = inputs;
    for (std::size_t s = 0; s < config.steps; ++s) {
        const auto g = nn::loss_and_gradients(net, adv, targets, true);
        adv = adv + (direction * step) * g.inputs.array().sign().matrix();
        adv = adv.cwiseMax(lo).cwiseMin(hi);
    }
    return adv;
}

std::vector<CurvePoint> attack_curve(const nn::MlpModel& model, const nn::Dataset& data,
                                     std::span<const double> epsilons, AttackConfig config,
                                     std::size_t samples, std::uint64_t seed) {
    if (epsilons.empty()) throw DomainError("attack_curve: no epsilons");
    data.validate();
    std::vector<std::size_t> idx(data.rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (samples < data.rows) {
        Rng rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(samples);
        std::sort(idx.begin(), idx.end());
    }
    const nn::MatrixD x = data.batch(idx);
    std::vector<std::uint32_t> labels;
    for (auto i : idx) labels.push_back(data.labels[i]);

    const auto net = nn::Network64::from(model);
    std::vector<CurvePoint> curve;
    for (double eps : epsilons) {
        config.epsilon = eps;
        const auto adv = iterative_attack(model, x, labels, config);
        const auto probs = nn::forward(net, adv).probabilities();
        std::size_t hits = 0;
        for (Eigen::Index r = 0; r < probs.rows(); ++r) {
            Eigen::Index arg = 0;
            probs.row(r).maxCoeff(&arg);
            hits += static_cast<std::uint32_t>(arg) == labels[static_cast<std::size_t>(r)];
        }
        curve.push_back({eps, static_cast<double>(hits) / static_cast<double>(labels.size())});
    }
    return curve;
}

}  // namespace mint::characterize
