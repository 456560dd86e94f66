#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mint/characterize/attack.hpp"
#include "mint/characterize/calibration.hpp"
#include "mint/error.hpp"
#include "mint/nn/train.hpp"

using namespace mint;
using characterize::AttackConfig;
using characterize::AttackMode;

TEST_CASE("ece: overconfident coin flip") {
    std::vector<double> conf(100, 1.0);
    std::vector<bool> correct(100);
    for (std::size_t i = 0; i < 100; ++i) correct[i] = i % 2 == 0;
    CHECK(characterize::ece(conf, correct).ece == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("ece: perfectly calibrated bins give zero") {
    // bin (0.7, 0.8]: ten samples at 0.75, 7.5 would be needed; use 0.8 with 8 of 10 right
    std::vector<double> conf(10, 0.8);
    std::vector<bool> correct{1, 1, 1, 1, 1, 1, 1, 1, 0, 0};
    conf.insert(conf.end(), 4, 0.25);
    for (bool b : {true, false, false, false}) correct.push_back(b);
    CHECK(characterize::ece(conf, correct).ece == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ece: worked six-sample example with two bins") {
    std::vector<double> conf{0.2, 0.4, 0.45, 0.6, 0.8, 0.9};
    std::vector<bool> correct{false, true, false, true, true, false};
    const auto p = characterize::ece(conf, correct, 2);
    REQUIRE(p.bins.size() == 2);
    CHECK(p.bins[0].count == 3);
    CHECK(p.bins[1].count == 3);
    CHECK(p.bins[0].mean_confidence == doctest::Approx(0.35));
    CHECK(p.bins[1].accuracy == doctest::Approx(2.0 / 3.0));
    // 0.5 * |1/3 - 0.35| + 0.5 * |2/3 - 23/30|
    CHECK(p.ece == doctest::Approx(0.0583333333333).epsilon(1e-10));
}

TEST_CASE("ece: bin edges, permutation invariance, errors") {
    std::vector<double> edge{0.5, 0.0};
    std::vector<bool> ok{true, true};
    const auto p = characterize::ece(edge, ok, 2);
    CHECK(p.bins[0].count == 2);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> conf(200);
    std::vector<bool> correct(200);
    for (std::size_t i = 0; i < 200; ++i) {
        conf[i] = u(rng);
        correct[i] = u(rng) < conf[i];
    }
    const double base = characterize::ece(conf, correct, 15).ece;
    std::vector<std::size_t> order(200);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> c2;
    std::vector<bool> k2;
    for (auto i : order) {
        c2.push_back(conf[i]);
        k2.push_back(correct[i]);
    }
    CHECK(characterize::ece(c2, k2, 15).ece == doctest::Approx(base).epsilon(1e-12));
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);

    CHECK_THROWS_AS(characterize::ece({}, {}), DomainError);
    std::vector<double> one{0.5};
    CHECK_THROWS_AS(characterize::ece(one, {true, false}), ShapeError);
}

namespace {

struct Trained {
    nn::Dataset data;
    nn::MlpModel model;
};

const Trained& trained_blobs() {
    static const Trained t = [] {
        auto data = nn::make_blobs(4, 150, 10, 3.0, 1.0, 8);
        std::size_t widths[] = {10, 32, 4};
        nn::TrainConfig cfg;
        cfg.epochs = 15;
        cfg.batch_size = 32;
        cfg.learning_rate = 0.05;
        cfg.milestones = {10};
        cfg.seed = 4;
        auto model = nn::train(nn::MlpModel::create(widths, 1), data, cfg).model;
        return Trained{std::move(data), std::move(model)};
    }();
    return t;
}

}  // namespace

TEST_CASE("attack: perturbation stays in the epsilon ball and the pixel box") {
    std::size_t widths[] = {20, 16, 5};
    const auto model = nn::MlpModel::create(widths, 11);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    nn::MatrixD x(1000, 20);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    // push some entries onto the box edges
    for (Eigen::Index r = 0; r < 1000; r += 7) x(r, 0) = 0.0, x(r, 1) = 1.0;
    std::vector<std::uint32_t> labels(1000);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 5);

    for (auto mode : {AttackMode::untargeted_fgsm, AttackMode::least_likely}) {
        for (double eps : {0.01, 0.1, 0.3}) {
            AttackConfig cfg;
            cfg.epsilon = eps;
            cfg.mode = mode;
            const auto adv = characterize::iterative_attack(model, x, labels, cfg);
            CHECK((adv - x).cwiseAbs().maxCoeff() <= eps);
            CHECK(adv.minCoeff() >= 0.0);
            CHECK(adv.maxCoeff() <= 1.0);
        }
    }
    AttackConfig zero;
    CHECK(characterize::iterative_attack(model, x, labels, zero) == x);

    nn::MatrixD outside = x;
    outside(0, 0) = 1.5;
    AttackConfig cfg;
    cfg.epsilon = 0.1;
    CHECK_THROWS_AS(characterize::iterative_attack(model, outside, labels, cfg), DomainError);
    CHECK_THROWS_AS(characterize::iterative_attack(model, x, std::span(labels).first(10), cfg), ShapeError);
    cfg.epsilon = -0.1;
    CHECK_THROWS_AS(characterize::iterative_attack(model, x, labels, cfg), DomainError);
}

TEST_CASE("attack: accuracy curve starts at clean accuracy and falls") {
    const auto& t = trained_blobs();
    const double clean = nn::evaluate(t.model, t.data).accuracy;
    CHECK(clean > 0.9);
    std::vector<double> eps{0.0, 0.05, 0.2};
    for (auto mode : {AttackMode::untargeted_fgsm, AttackMode::least_likely}) {
        AttackConfig cfg;
        cfg.mode = mode;
        const auto curve = characterize::attack_curve(t.model, t.data, eps, cfg, 100000, 1);
        REQUIRE(curve.size() == 3);
        CHECK(curve[0].accuracy == doctest::Approx(clean).epsilon(1e-12));
        CHECK(curve[2].accuracy < curve[0].accuracy);
        CHECK(curve[2].accuracy <= curve[1].accuracy);
    }
    AttackConfig cfg;
    const auto a = characterize::attack_curve(t.model, t.data, eps, cfg, 50, 9);
    const auto b = characterize::attack_curve(t.model, t.data, eps, cfg, 50, 9);
    CHECK(a[1].accuracy == b[1].accuracy);
}
