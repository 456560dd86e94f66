#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mint/io/config.hpp"
#include "mint/nn/activations.hpp"
#include "mint/nn/dataset.hpp"
#include "mint/nn/footprint.hpp"
#include "mint/nn/model.hpp"
#include "mint/nn/train.hpp"
#include "mint/prune/mask.hpp"
#include "mint/prune/sparsity.hpp"

namespace mint::cli {

// Every random draw in a run descends from config.seed through these slots.
enum class SeedSlot : std::uint64_t { data = 0, init = 1, train = 2, sample = 3, gmi = 4, retrain = 5, attack = 6 };
std::uint64_t stage_seed(const io::RunConfig& config, SeedSlot slot);

struct DataSplit {
    nn::Dataset train;
    nn::Dataset test;
};

/// MNIST from the resolved data directory, or seeded blobs split per class.
DataSplit load_data(const io::RunConfig& config);
std::filesystem::path resolve_data_dir(const io::RunConfig& config);

nn::MlpModel initial_model(const io::RunConfig& config);
nn::TrainResult train_baseline(const io::RunConfig& config, const nn::Dataset& train);
nn::TrainResult retrain(const io::RunConfig& config, const nn::MlpModel& model, const prune::PruneMask& mask,
                        const nn::Dataset& train);

nn::ActivationDump capture(const io::RunConfig& config, const nn::MlpModel& model, const nn::Dataset& train);

/// Layer shapes seen by the pruner: the model's layers, preceded by a weightless
/// "input" layer (784 x 0 for MNIST) when config.prune_input is set.
std::vector<prune::LayerShape> prune_shapes(const io::RunConfig& config, const nn::MlpModel& model);

/// Drops the pseudo input layer so the mask lines up with the model.
prune::PruneMask model_mask(const io::RunConfig& config, prune::PruneMask mask);

/// Dependency tables for every consecutive pair of prune_shapes.
std::vector<prune::PairScores> score_pairs(const io::RunConfig& config, const std::vector<prune::LayerShape>& shapes,
                                           const nn::ActivationDump& dump);

/// Groupings rebuilt around tables read from disk.
std::vector<prune::PairScores> attach_groupings(const std::vector<prune::LayerShape>& shapes,
                                                const std::vector<prune::DependencyTable>& tables);

struct PruneOutcome {
    prune::PruneMask mask;  // aligned with the model's layers
    double delta = 0.0;
    double scored_fraction = 0.0;  // pruned share of the weights in scored layers
    bool unreachable = false;      // target could not be met under gamma
};

/// Fixed delta, or the delta solved for config.target_sparsity when set.
PruneOutcome make_mask(const io::RunConfig& config, const std::vector<prune::LayerShape>& shapes,
                       const std::vector<prune::PairScores>& pairs);

struct Report {
    double baseline_accuracy = 0.0;
    double pruned_accuracy = 0.0;
    prune::SparsityReport sparsity;  // zero pattern of the pruned model
    nn::Footprint baseline_footprint;
    nn::Footprint pruned_footprint;
};

Report build_report(const nn::MlpModel& baseline, const nn::MlpModel& pruned, const nn::Dataset& test);
std::string format_report(const Report& report);
std::string format_sparsity_table(const prune::SparsityReport& report);

}  // namespace mint::cli
