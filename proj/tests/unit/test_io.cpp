#include <doctest.h>

#include <filesystem>
#include <algorithm>
#include <cstdlib>
#include <random>

#include "../support/format_corpus.hpp"
#include "mint/error.hpp"
#include "mint/io/config.hpp"
#include "mint/io/files.hpp"
#include "mint/io/formats.hpp"
#include "mint/nn/activations.hpp"

using namespace mint;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = MINT_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "mint-test-io";
    fs::create_directories(dir);
    return dir / name;
}

nn::ActivationDump random_dump(std::uint64_t seed, std::size_t m, std::vector<std::size_t> widths) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0.0f, 2.0f);
    nn::ActivationDump d;
    for (std::size_t r = 0; r < m; ++r) d.labels.push_back(static_cast<std::uint32_t>(rng() % 1000));
    for (std::size_t k = 0; k < widths.size(); ++k) {
        gmi::SampleMatrix values(m, widths[k]);
        for (auto& v : values.data()) v = g(rng);
        d.layers.push_back({"layer" + std::to_string(k), std::move(values)});
    }
    return d;
}

nn::MlpModel golden_model() {
    nn::DenseLayer a{3, 2, nn::Activation::relu, {0.5f, -1.0f, 0.25f, 2.0f, 0.0f, -0.75f}, {0.1f, 0.0f, -0.2f}};
    nn::DenseLayer b{2, 3, nn::Activation::softmax, {1.0f, 0.0f, -1.0f, 0.5f, 0.5f, 0.5f}, {0.0f, 0.3f}};
    return nn::MlpModel({a, b});
}

}  // namespace

TEST_CASE("activations: golden file decodes to the known matrices and verifies its checksum") {
    auto dump = io::read_activations(kFixtures / "golden_acts.mact");
    REQUIRE(dump.layers.size() == 2);
    CHECK(dump.layers[0].name == "fc1");
    CHECK(dump.layers[1].name == "fc2");
    CHECK(dump.labels == std::vector<std::uint32_t>{0, 1, 1});
    CHECK(dump.layers[0].values == gmi::SampleMatrix(3, 2, {0.0, 1.5, 2.25, -0.5, 0.125, 3.0}));
    CHECK(dump.layers[1].values == gmi::SampleMatrix(3, 1, {1.0, 0.0, 0.75}));
    CHECK(dump.m_per_class == 0);
}

TEST_CASE("activations: encoder reproduces the golden bytes") {
    auto dump = io::read_activations(kFixtures / "golden_acts.mact");
    auto plain = io::encode_activations(dump);
    auto golden = io::read_bytes(kFixtures / "golden_acts.mact");
    // golden carries a checksum only on fc2; fc1 records must match byte for byte
    const std::size_t fc1_record = 8 + 4 + 3 + 8 + 3 * 2 + 6 * 4;
    CHECK(std::equal(plain.begin(), plain.begin() + fc1_record, golden.begin()));
    auto with_sums = io::decode_activations(io::encode_activations(dump, true));
    CHECK(with_sums == dump);
}

TEST_CASE("activations: random round trip is bit-exact") {
    auto dump = random_dump(4, 37, {5, 1, 12});
    const auto path = scratch("round.mact");
    io::write_activations(dump, path);
    auto back = io::read_activations(path);
    back.m_per_class = dump.m_per_class;
    CHECK(back == dump);
    CHECK(io::encode_activations(back) == io::read_bytes(path));
}

TEST_CASE("activations: empty list is a header-only file; m = 0 is rejected at write") {
    nn::ActivationDump empty;
    auto bytes = io::encode_activations(empty);
    CHECK(bytes.size() == 8);
    CHECK(io::decode_activations(bytes).layers.empty());

    nn::ActivationDump zero;
    zero.layers.push_back({"fc1", gmi::SampleMatrix(0, 3)});
    CHECK_THROWS_AS(io::encode_activations(zero), FormatError);

    auto big_label = random_dump(1, 3, {2});
    big_label.labels[0] = 70000;
    CHECK_THROWS_AS(io::encode_activations(big_label), FormatError);

    auto inexact = random_dump(1, 3, {2});
    inexact.layers[0].values(0, 0) = 0.1;
    CHECK_THROWS_AS(io::encode_activations(inexact), FormatError);
}

TEST_CASE("activations: checksum suffix detects a flipped payload bit") {
    auto dump = random_dump(9, 6, {4});
    auto bytes = io::encode_activations(dump, true);
    CHECK(io::decode_activations(bytes) == dump);
    bytes[bytes.size() - 2] ^= 0x10;
    CHECK_THROWS_AS(io::decode_activations(bytes), CorruptionError);
}

TEST_CASE("activations: capture output survives a file round trip") {
    auto data = nn::make_blobs(3, 20, 4, 3.0, 1.0, 1);
    std::size_t widths[] = {4, 6, 3};
    auto dump = nn::capture_activations(nn::MlpModel::create(widths, 2), data, 10, 3, true);
    auto back = io::decode_activations(io::encode_activations(dump));
    CHECK(back.layers == dump.layers);
    CHECK(back.labels == dump.labels);
}

TEST_CASE("model: golden file and round trip") {
    auto model = io::read_model(kFixtures / "golden_model.mdl");
    CHECK(model == golden_model());
    CHECK(io::encode_model(model) == io::read_bytes(kFixtures / "golden_model.mdl"));

    std::size_t widths[] = {30, 20, 10, 5};
    auto random = nn::MlpModel::create(widths, 77);
    const auto path = scratch("round.mdl");
    io::write_model(random, path);
    CHECK(io::read_model(path) == random);
}

TEST_CASE("mask: golden file and round trip") {
    auto mask = io::read_mask(kFixtures / "golden_mask.txt");
    REQUIRE(mask.layers.size() == 2);
    CHECK(mask.layers[0].delta == std::nullopt);
    CHECK(mask.layers[1].delta == 0.25);
    CHECK(mask.layers[1].consumer_groups == 2);
    CHECK(mask.layers[1].producer_groups == 3);
    CHECK(mask.layers[1].keep == std::vector<std::uint8_t>{1, 0, 1, 0, 1, 1});
    CHECK(io::encode_mask(mask) == io::read_text(kFixtures / "golden_mask.txt"));

    prune::PruneMask random;
    std::mt19937_64 rng(2);
    for (std::size_t k = 0; k < 3; ++k) {
        auto l = prune::LayerMask::all_ones("fc" + std::to_string(k + 1), 7 + k, 9 - k);
        for (auto& v : l.keep) v = rng() % 2;
        l.consumer_groups = 2;
        l.producer_groups = 3;
        if (k > 0) l.delta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        random.layers.push_back(std::move(l));
    }
    const auto path = scratch("round.mask");
    io::write_mask(random, path);
    CHECK(io::read_mask(path) == random);
}

TEST_CASE("dependency tables: text round trip") {
    std::vector<prune::DependencyTable> tables(2);
    std::mt19937_64 rng(5);
    for (std::size_t p = 0; p < 2; ++p) {
        tables[p].pair_index = p;
        tables[p].consumer_groups = 3 + p;
        tables[p].producer_groups = 2;
        for (std::size_t i = 0; i < tables[p].consumer_groups * 2; ++i) {
            tables[p].scores.push_back({std::uniform_real_distribution<double>(0, 1)(rng), rng() % 50, 50});
        }
    }
    CHECK(io::decode_tables(io::encode_tables(tables)) == tables);
    CHECK_THROWS_AS(io::decode_tables("nonsense\n"), FormatError);
}

TEST_CASE("config: defaults, overrides, round trip") {
    io::RunConfig defaults;
    defaults.validate();
    CHECK(defaults.train.epochs == 30);
    CHECK(defaults.train.batch_size == 256);
    CHECK(defaults.train.milestones == std::vector<std::size_t>{10, 20});
    CHECK(defaults.train.weight_decay == 1e-4);

    auto c = io::parse_config("# comment\nseed = 42\ngroups=250:100,300:10,1:1\ngamma=0.45 # trailing\ntarget_sparsity=none\n");
    CHECK(c.seed == 42);
    CHECK(c.gamma == 0.45);
    CHECK_FALSE(c.target_sparsity.has_value());
    CHECK(c.groups.per_pair.size() == 3);
    CHECK(c.groups.for_pair(1, 500, 300) == std::pair<std::size_t, std::size_t>{300, 10});

    auto uniform = io::parse_config("groups=64\n");
    CHECK(uniform.groups.for_pair(2, 300, 10) == std::pair<std::size_t, std::size_t>{64, 10});

    c.epsilons = {0.0, 0.1 + 0.2, 1.0 / 3.0};
    c.skip_layers = {0, 2};
    const auto path = scratch("round.cfg");
    io::write_config(c, path);
    CHECK(io::read_config(path) == c);
    CHECK(io::format_config(io::read_config(path)) == io::read_text(path));
}

TEST_CASE("config: validation catches bad ranges") {
    auto bad = [](const std::string& text) { return io::parse_config(text).validate(); };
    CHECK_THROWS_AS(bad("delta=1.5\n"), ConfigError);
    CHECK_THROWS_AS(bad("gamma=0\n"), ConfigError);
    CHECK_THROWS_AS(bad("groups=1:1\n"), ConfigError);
    CHECK_THROWS_AS(bad("skip_layers=7\n"), ConfigError);
    CHECK_THROWS_AS(bad("dataset=cifar\n"), ConfigError);
    CHECK_THROWS_AS(bad("groups=900:20,25:20,30:10\n"), ConfigError);
    CHECK_THROWS_AS(io::parse_config("prune_input=maybe\n"), ConfigError);
}

TEST_CASE("idx: golden files decode with scaled pixels") {
    auto d = io::read_mnist_idx(kFixtures / "golden-images-idx3-ubyte", kFixtures / "golden-labels-idx1-ubyte");
    CHECK(d.rows == 3);
    CHECK(d.dims == 4);
    CHECK(d.labels == std::vector<std::uint32_t>{3, 0, 9});
    CHECK(d.classes == 10);
    CHECK(d.features[1] == 1.0f);
    CHECK(d.features[2] == 128.0f / 255.0f);
    for (float v : d.features) CHECK((v >= 0.0f && v <= 1.0f));
}

TEST_CASE("corruption corpus: every fixture is rejected with the expected error class") {
    const auto cases = testing::run_corrupt_corpus(kFixtures);
    CHECK(cases.size() >= 10);
    for (const auto& c : cases) {
        INFO(c.file);
        CHECK(c.observed == c.expected);
    }
}

TEST_CASE("files: missing input is an I/O error") {
    CHECK_THROWS_AS(io::read_bytes("/nonexistent/mint/file"), IoError);
    CHECK_THROWS_AS(io::write_text("/nonexistent/mint/dir/file", "x"), IoError);
    CHECK(io::fnv1a64({}) == 0xcbf29ce484222325ULL);
}

TEST_CASE("idx: the MNIST files, when present, decode to the standard shapes") {
    const char* env = std::getenv("MINT_DATA_DIR");
    const fs::path dir = env ? fs::path(env) : fs::path("/root/data/mnist");
    if (!fs::exists(dir / "train-images-idx3-ubyte")) return;
    const auto train = io::load_mnist(dir, "train");
    const auto test = io::load_mnist(dir, "test");
    CHECK(train.rows == 60000);
    CHECK(test.rows == 10000);
    CHECK(train.dims == 784);
    CHECK(train.classes == 10);
    CHECK(std::all_of(train.features.begin(), train.features.end(), [](float v) { return v >= 0.0f && v <= 1.0f; }));
    CHECK(std::all_of(test.labels.begin(), test.labels.end(), [](std::uint32_t l) { return l < 10; }));
}
