#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mint/nn/train.hpp"

namespace mint::io {

/// Group counts for every layer pair. Either one G applied to both sides of
/// every pair (capped at each layer's width), or an explicit (producer G,
/// consumer G) per pair, written "250:100,300:10".
struct GroupSpec {
    std::optional<std::size_t> uniform;
    std::vector<std::pair<std::size_t, std::size_t>> per_pair;

    static GroupSpec parse(const std::string& text);
    std::string to_string() const;
    /// (producer G, consumer G) for pair p with the given layer widths.
    std::pair<std::size_t, std::size_t> for_pair(std::size_t p, std::size_t producer_width,
                                                 std::size_t consumer_width) const;
    bool operator==(const GroupSpec&) const = default;
};

struct RunConfig {
    std::uint64_t seed = 0;

    // data
    std::string dataset = "mnist";  // mnist | blobs
    std::string data_dir;           // empty: $MINT_DATA_DIR, then ./data/mnist
    std::size_t blobs_classes = 4;
    std::size_t blobs_per_class = 300;
    std::size_t blobs_dims = 8;
    double blobs_radius = 3.0;
    double blobs_spread = 1.0;
    std::size_t blobs_test_per_class = 100;

    // model and training (retraining uses the same settings)
    std::vector<std::size_t> widths{784, 500, 300, 10};
    nn::TrainConfig train;

    // pruning; with prune_input the input features act as layer 0 and pair 0
    // scores input -> fc1, so pair p governs fc{p+1}
    bool prune_input = true;
    GroupSpec groups = GroupSpec::parse("28:20,25:20,30:10");
    std::size_t samples_per_class = 50;
    double delta = 0.645;
    double gamma = 1.0;
    std::set<std::size_t> skip_layers{2};  // the output pair of the default MLP
    std::optional<double> target_sparsity = 0.9;  // when set, delta is solved for it
    unsigned threads = 0;  // 0: hardware concurrency

    // characterization
    std::vector<double> epsilons{0.0, 0.02, 0.05, 0.1};
    std::size_t attack_steps = 10;
    std::size_t attack_samples = 1000;
    std::size_t bins = 10;

    /// Range and consistency checks; throws ConfigError.
    void validate() const;

    /// Number of scored layer pairs for these widths.
    std::size_t pair_count() const { return widths.size() - 2 + (prune_input ? 1 : 0); }
    /// Filter counts of the pair sequence: input width first when prune_input.
    std::vector<std::size_t> pair_widths() const;

    bool operator==(const RunConfig&) const = default;
};

/// Applies "key=value" lines ('#' starts a comment) on top of `base`.
/// Unknown keys, duplicates and unparsable values raise ConfigError.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig read_config(const std::filesystem::path& path, RunConfig base = {});

/// Sets one key; the same parser used for files, so flags and files agree.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Every key in a fixed order, with doubles printed to round-trip exactly.
std::string format_config(const RunConfig& config);
void write_config(const RunConfig& config, const std::filesystem::path& path);

std::vector<std::string> config_keys();

}  // namespace mint::io
