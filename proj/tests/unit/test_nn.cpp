#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mint/error.hpp"
#include "mint/nn/activations.hpp"
#include "mint/nn/dataset.hpp"
#include "mint/nn/footprint.hpp"
#include "mint/nn/model.hpp"
#include "mint/nn/train.hpp"

using namespace mint;
using namespace mint::nn;

namespace {

MlpModel single_unit(float w, float b) {
    DenseLayer l;
    l.out = 1;
    l.in = 1;
    l.activation = Activation::relu;
    l.weights = {w};
    l.bias = {b};
    return MlpModel({l});
}

prune::PruneMask ones_mask(const MlpModel& m) {
    prune::PruneMask mask;
    for (std::size_t k = 0; k < m.layer_count(); ++k) {
        mask.layers.push_back(prune::LayerMask::all_ones(MlpModel::layer_name(k), m.layers()[k].out, m.layers()[k].in));
    }
    return mask;
}

prune::PruneMask random_mask(const MlpModel& m, double keep, std::uint64_t seed) {
    auto mask = ones_mask(m);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(keep);
    for (auto& l : mask.layers)
        for (auto& k : l.keep) k = coin(rng);
    return mask;
}

double loss_on(const MlpModel& m, const Dataset& d) {
    return loss_and_gradients(Network64::from(m), d.all(), d.labels).loss;
}

TrainConfig quick_config(std::size_t epochs, std::uint64_t seed = 3) {
    TrainConfig c;
    c.epochs = epochs;
    c.batch_size = 32;
    c.learning_rate = 0.05;
    c.milestones = {};
    c.seed = seed;
    return c;
}

double relative_error(const MatrixD& a, const MatrixD& b) {
    const double denom = std::max(a.norm() + b.norm(), 1e-12);
    return (a - b).norm() / denom;
}

}  // namespace

TEST_CASE("forward: zero parameters give zero hidden activations and uniform output") {
    std::size_t widths[] = {3, 4, 5};
    auto m = MlpModel::create(widths, 1);
    for (auto& l : m.layers()) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0f);
        std::fill(l.bias.begin(), l.bias.end(), 0.0f);
    }
    MatrixD x = MatrixD::Random(6, 3);
    auto fw = forward(m, x);
    CHECK(fw.activations[0].cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index r = 0; r < 6; ++r)
        for (Eigen::Index c = 0; c < 5; ++c) CHECK(fw.probabilities()(r, c) == doctest::Approx(0.2));
}

TEST_CASE("forward: 1x1 relu unit") {
    auto m = single_unit(1.0f, 0.0f);
    MatrixD x(2, 1);
    x << -2.0, 3.0;
    auto fw = forward(m, x);
    CHECK(fw.activations[0](0, 0) == 0.0);
    CHECK(fw.activations[0](1, 0) == 3.0);
}

TEST_CASE("forward: softmax rows sum to one for seed 5") {
    std::size_t widths[] = {10, 16, 7};
    auto m = MlpModel::create(widths, 5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixD x(50, 10);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    auto p = forward(m, x).probabilities();
    for (Eigen::Index r = 0; r < p.rows(); ++r) CHECK(std::abs(p.row(r).sum() - 1.0) <= 1e-6);
}

TEST_CASE("forward: width mismatch is a shape error") {
    std::size_t widths[] = {3, 2};
    auto m = MlpModel::create(widths, 1);
    CHECK_THROWS_AS(forward(m, MatrixD::Zero(2, 4)), ShapeError);
}

TEST_CASE("model: validation rejects broken shapes and misplaced softmax") {
    DenseLayer a{2, 3, Activation::softmax, std::vector<float>(6, 0.1f), std::vector<float>(2, 0.0f)};
    DenseLayer b{2, 2, Activation::softmax, std::vector<float>(4, 0.1f), std::vector<float>(2, 0.0f)};
    CHECK_THROWS_AS(MlpModel({a, b}), ShapeError);
    DenseLayer c{2, 5, Activation::softmax, std::vector<float>(10, 0.1f), std::vector<float>(2, 0.0f)};
    a.activation = Activation::relu;
    CHECK_THROWS_AS(MlpModel({a, c}), ShapeError);
    a.weights[0] = std::nanf("");
    CHECK_THROWS_AS(MlpModel({a}), DomainError);
}

TEST_CASE("model: He-uniform init is seeded and bounded") {
    std::size_t widths[] = {20, 10, 3};
    auto a = MlpModel::create(widths, 9);
    auto b = MlpModel::create(widths, 9);
    auto c = MlpModel::create(widths, 10);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    const float limit = static_cast<float>(std::sqrt(6.0 / 20.0));
    for (float w : a.layers()[0].weights) CHECK(std::abs(w) <= limit);
    CHECK(a.layers()[1].activation == Activation::softmax);
    CHECK(MlpModel::layer_name(1) == "fc2");
}

TEST_CASE("gradient check: analytic matches central differences on a 3-layer model") {
    std::size_t widths[] = {5, 7, 6, 4};
    auto model = MlpModel::create(widths, 11);
    for (auto& l : model.layers())
        for (auto& b : l.bias) b = 0.05f;
    auto net = Network64::from(model);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixD x(8, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    std::vector<std::uint32_t> y{0, 1, 2, 3, 0, 1, 2, 3};

    const auto g = loss_and_gradients(net, x, y, true);
    const double h = 1e-6;
    auto loss_at = [&](const Network64& n, const MatrixD& in) { return loss_and_gradients(n, in, y).loss; };

    for (std::size_t k = 0; k < net.weights.size(); ++k) {
        MatrixD numeric(net.weights[k].rows(), net.weights[k].cols());
        for (Eigen::Index i = 0; i < numeric.size(); ++i) {
            auto plus = net, minus = net;
            plus.weights[k].data()[i] += h;
            minus.weights[k].data()[i] -= h;
            numeric.data()[i] = (loss_at(plus, x) - loss_at(minus, x)) / (2 * h);
        }
        CHECK(relative_error(g.weights[k], numeric) <= 1e-4);

        MatrixD numeric_b(net.biases[k].size(), 1), analytic_b = g.biases[k];
        for (Eigen::Index i = 0; i < net.biases[k].size(); ++i) {
            auto plus = net, minus = net;
            plus.biases[k](i) += h;
            minus.biases[k](i) -= h;
            numeric_b(i, 0) = (loss_at(plus, x) - loss_at(minus, x)) / (2 * h);
        }
        CHECK(relative_error(analytic_b, numeric_b) <= 1e-4);
    }

    MatrixD numeric_x(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        MatrixD plus = x, minus = x;
        plus.data()[i] += h;
        minus.data()[i] -= h;
        numeric_x.data()[i] = (loss_at(net, plus) - loss_at(net, minus)) / (2 * h);
    }
    CHECK(relative_error(g.inputs, numeric_x) <= 1e-4);
}

TEST_CASE("train: zero epochs leave parameters bit-identical") {
    auto data = make_blobs(2, 50, 2, 3.0, 0.5, 1);
    std::size_t widths[] = {2, 8, 2};
    auto m = MlpModel::create(widths, 2);
    auto r = train(m, data, quick_config(0));
    CHECK(r.model == m);
    CHECK(r.trace.empty());
}

TEST_CASE("train: two Gaussian blobs reach 99% training accuracy") {
    auto data = make_blobs(2, 200, 2, 3.0, 0.5, 7);
    std::size_t widths[] = {2, 8, 2};
    auto r = train(MlpModel::create(widths, 1), data, quick_config(20));
    CHECK(evaluate(r.model, data).accuracy >= 0.99);
    REQUIRE(r.trace.size() == 20);
}

TEST_CASE("train: loss decreases over the first epoch") {
    auto data = make_blobs(3, 100, 4, 3.0, 1.0, 2);
    std::size_t widths[] = {4, 16, 3};
    auto m = MlpModel::create(widths, 3);
    auto r = train(m, data, quick_config(1));
    CHECK(loss_on(r.model, data) < loss_on(m, data));
}

TEST_CASE("train: deterministic for identical inputs and seed") {
    auto data = make_blobs(3, 80, 4, 3.0, 1.0, 2);
    std::size_t widths[] = {4, 16, 8, 3};
    auto m = MlpModel::create(widths, 3);
    auto a = train(m, data, quick_config(3, 5));
    auto b = train(m, data, quick_config(3, 5));
    auto c = train(m, data, quick_config(3, 6));
    CHECK(a.model == b.model);
    CHECK_FALSE(a.model == c.model);
}

TEST_CASE("train: learning rate schedule and config validation") {
    TrainConfig c;
    CHECK(c.learning_rate_at(0) == doctest::Approx(0.1));
    CHECK(c.learning_rate_at(10) == doctest::Approx(0.01));
    CHECK(c.learning_rate_at(25) == doctest::Approx(0.001));
    c.milestones = {5, 5};
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = TrainConfig{};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = TrainConfig{};
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("train: divergence raises a training failure") {
    auto data = make_blobs(2, 50, 2, 3.0, 0.5, 1);
    std::size_t widths[] = {2, 8, 2};
    auto cfg = quick_config(5);
    cfg.learning_rate = 1e30;
    CHECK_THROWS_AS(train(MlpModel::create(widths, 2), data, cfg), TrainingFailure);
}

TEST_CASE("apply_mask: all-ones, all-zeros layer, random counts") {
    std::size_t widths[] = {6, 5, 4, 3};
    auto m = MlpModel::create(widths, 4);
    CHECK(apply_mask(m, ones_mask(m)) == m);

    auto mask = ones_mask(m);
    std::fill(mask.layers[1].keep.begin(), mask.layers[1].keep.end(), 0);
    auto z = apply_mask(m, mask);
    for (float w : z.layers()[1].weights) CHECK(w == 0.0f);
    CHECK(z.layers()[1].bias == m.layers()[1].bias);
    CHECK(z.layers()[0] == m.layers()[0]);

    auto rm = random_mask(m, 0.6, 8);
    auto r = apply_mask(m, rm);
    std::size_t zeros = 0, expected = 0;
    for (std::size_t k = 0; k < r.layer_count(); ++k) {
        zeros += static_cast<std::size_t>(std::count(r.layers()[k].weights.begin(), r.layers()[k].weights.end(), 0.0f));
        expected += rm.layers[k].zero_count();
        for (std::size_t i = 0; i < rm.layers[k].keep.size(); ++i) {
            if (rm.layers[k].keep[i]) CHECK(r.layers()[k].weights[i] == m.layers()[k].weights[i]);
        }
    }
    CHECK(zeros == expected);
    CHECK(zero_pattern(r) == [&] {
        auto p = rm;
        for (auto& l : p.layers) l.consumer_groups = l.producer_groups = 1;
        return p;
    }());

    auto bad = ones_mask(m);
    bad.layers[0].cols = 7;
    CHECK_THROWS_AS(apply_mask(m, bad), ShapeError);
}

TEST_CASE("retrain_masked: all-ones mask is bit-identical to train") {
    auto data = make_blobs(3, 60, 4, 3.0, 1.0, 5);
    std::size_t widths[] = {4, 12, 3};
    auto m = MlpModel::create(widths, 6);
    auto cfg = quick_config(4, 9);
    CHECK(retrain_masked(m, ones_mask(m), data, cfg).model == train(m, data, cfg).model);
}

TEST_CASE("retrain_masked: masked entries are zero after every epoch") {
    auto data = make_blobs(3, 60, 4, 3.0, 1.0, 5);
    std::size_t widths[] = {4, 12, 10, 3};
    auto m = MlpModel::create(widths, 6);
    auto mask = random_mask(m, 0.5, 3);
    std::size_t epochs_seen = 0;
    auto r = retrain_masked(m, mask, data, quick_config(5), [&](std::size_t, const MlpModel& snap) {
        ++epochs_seen;
        for (std::size_t k = 0; k < snap.layer_count(); ++k)
            for (std::size_t i = 0; i < mask.layers[k].keep.size(); ++i)
                if (!mask.layers[k].keep[i]) CHECK(snap.layers()[k].weights[i] == 0.0f);
    });
    CHECK(epochs_seen == 5);
    CHECK(evaluate(r.model, data).accuracy > 0.5);
}

TEST_CASE("evaluate: uniform predictor, argmax labels, counting oracle") {
    std::size_t widths[] = {4, 10};
    auto flat = MlpModel::create(widths, 1);
    for (auto& w : flat.layers()[0].weights) w = 0.0f;
    auto data = make_blobs(10, 5, 4, 3.0, 1.0, 2);
    auto ev = evaluate(flat, data);
    for (double c : ev.confidences) CHECK(c == doctest::Approx(0.1));

    std::size_t w2[] = {4, 6, 10};
    auto m = MlpModel::create(w2, 3);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d;
    d.rows = 100;
    d.dims = 4;
    d.classes = 10;
    for (std::size_t i = 0; i < 400; ++i) d.features.push_back(static_cast<float>(u(rng)));
    const auto probs = forward(m, d.all()).probabilities();
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        Eigen::Index arg = 0;
        probs.row(r).maxCoeff(&arg);
        d.labels.push_back(static_cast<std::uint32_t>(arg));
    }
    CHECK(evaluate(m, d).accuracy == 1.0);

    std::size_t hits = 0;
    for (std::size_t r = 0; r < d.rows; ++r) {
        d.labels[r] = static_cast<std::uint32_t>(rng() % 10);
        Eigen::Index arg = 0;
        probs.row(static_cast<Eigen::Index>(r)).maxCoeff(&arg);
        hits += static_cast<std::uint32_t>(arg) == d.labels[r];
    }
    CHECK(evaluate(m, d).accuracy == static_cast<double>(hits) / 100.0);
}

TEST_CASE("capture_activations: counts, codomain, stratification") {
    auto data = make_blobs(2, 300, 4, 3.0, 1.0, 1);
    std::size_t widths[] = {4, 8, 6, 2};
    auto m = MlpModel::create(widths, 2);
    auto dump = capture_activations(m, data, 250, 7);
    REQUIRE(dump.layers.size() == 3);
    for (const auto& l : dump.layers) CHECK(l.values.rows() == 500);
    for (std::size_t k = 0; k < 2; ++k)
        for (double v : dump.layers[k].values.data()) CHECK(v >= 0.0);
    CHECK(std::count(dump.labels.begin(), dump.labels.end(), 0u) == 250);
    CHECK(dump.m_per_class == 250);
    CHECK(capture_activations(m, data, 250, 7) == dump);
    CHECK_FALSE(capture_activations(m, data, 250, 8) == dump);
    CHECK_THROWS_AS(capture_activations(m, data, 301, 7), SamplingError);

    auto with_input = capture_activations(m, data, 10, 7, true);
    REQUIRE(with_input.layers.size() == 4);
    CHECK(with_input.layers[0].name == "input");
    CHECK(with_input.layers[0].values.cols() == 4);
    CHECK(with_input.layer("fc1").values.cols() == 8);
}

TEST_CASE("spatial_average: constant 3x3 map averages to its value") {
    std::vector<float> maps(2 * 9, 1.0f);
    for (std::size_t i = 9; i < 18; ++i) maps[i] = static_cast<float>(i - 9);
    auto avg = spatial_average(maps, 2, 9);
    CHECK(avg[0] == 1.0);
    CHECK(avg[1] == 4.0);
    CHECK_THROWS_AS(spatial_average(maps, 3, 9), ShapeError);
}

TEST_CASE("csr: formula, round trip, and monotonicity") {
    const std::size_t n = 12;
    std::vector<float> dense(n * n, 1.5f);
    auto full = CsrMatrix::from_dense(dense, n, n);
    CHECK(full.bytes() > 4 * n * n);
    CHECK(full.bytes() == 8 * n * n + 4 * (n + 1) + 16);

    std::vector<float> zero(n * n, 0.0f);
    CHECK(CsrMatrix::from_dense(zero, n, n).bytes() == 4 * (n + 1) + 16);

    std::mt19937_64 rng(1);
    std::vector<float> sparse(n * n);
    for (auto& v : sparse) v = rng() % 3 == 0 ? 0.0f : static_cast<float>(rng() % 100) - 50.0f;
    CHECK(CsrMatrix::from_dense(sparse, n, n).to_dense() == sparse);

    std::size_t widths[] = {10, 8, 4};
    auto m = MlpModel::create(widths, 1);
    std::size_t prev = csr_footprint(m).sparse_bytes;
    CHECK(csr_footprint(m).dense_bytes == 4 * (80 + 8 + 32 + 4));
    for (std::size_t i = 0; i < 80; ++i) {
        m.layers()[0].weights[i] = 0.0f;
        const auto now = csr_footprint(m).sparse_bytes;
        CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("csr: MLP with 96% of its scored layers zeroed is under 10% of dense") {
    std::size_t widths[] = {784, 500, 300, 10};
    auto m = MlpModel::create(widths, 1);
    std::mt19937_64 rng(3);
    std::bernoulli_distribution keep(0.04);
    for (std::size_t k = 0; k < 2; ++k)
        for (auto& w : m.layers()[k].weights)
            if (!keep(rng)) w = 0.0f;
    const auto fp = csr_footprint(m);
    CHECK(fp.ratio() < 0.10);
}

TEST_CASE("dataset: generators, split, validation") {
    auto blobs = make_blobs(3, 40, 5, 3.0, 1.0, 4);
    CHECK(blobs.rows == 120);
    CHECK(blobs.class_counts() == std::vector<std::size_t>{40, 40, 40});
    for (float v : blobs.features) CHECK((v >= 0.0f && v <= 1.0f));
    CHECK(make_blobs(3, 40, 5, 3.0, 1.0, 4).features == blobs.features);

    auto rings = make_rings(2, 30, 0.05, 1);
    CHECK(rings.dims == 2);
    for (float v : rings.features) CHECK((v >= 0.0f && v <= 1.0f));

    auto [tr, te] = split_per_class(blobs, 10, 3);
    CHECK(te.rows == 30);
    CHECK(tr.rows == 90);
    CHECK(te.class_counts() == std::vector<std::size_t>{10, 10, 10});
    CHECK_THROWS_AS(split_per_class(blobs, 40, 3), SamplingError);

    Dataset bad = blobs;
    bad.labels[0] = 3;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = blobs;
    bad.features.pop_back();
    CHECK_THROWS_AS(bad.validate(), ShapeError);
}
