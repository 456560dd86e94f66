#include "mint/cli/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "mint/error.hpp"
#include "mint/io/formats.hpp"
#include "mint/random.hpp"

namespace mint::cli {

std::uint64_t stage_seed(const io::RunConfig& config, SeedSlot slot) {
    return derive_seed(config.seed, {static_cast<std::uint64_t>(slot)});
}

std::filesystem::path resolve_data_dir(const io::RunConfig& config) {
    if (!config.data_dir.empty()) return config.data_dir;
    if (const char* env = std::getenv("MINT_DATA_DIR"); env && *env) return env;
    return "data/mnist";
}

DataSplit load_data(const io::RunConfig& config) {
    if (config.dataset == "mnist") {
        const auto dir = resolve_data_dir(config);
        return {io::load_mnist(dir, "train"), io::load_mnist(dir, "test")};
    }
    auto all = nn::make_blobs(config.blobs_classes, config.blobs_per_class, config.blobs_dims, config.blobs_radius,
                              config.blobs_spread, stage_seed(config, SeedSlot::data));
    auto [train, test] = nn::split_per_class(all, config.blobs_test_per_class,
                                             derive_seed(stage_seed(config, SeedSlot::data), {1}));
    return {std::move(train), std::move(test)};
}

nn::MlpModel initial_model(const io::RunConfig& config) {
    return nn::MlpModel::create(config.widths, stage_seed(config, SeedSlot::init));
}

nn::TrainResult train_baseline(const io::RunConfig& config, const nn::Dataset& train) {
    auto tc = config.train;
    tc.seed = stage_seed(config, SeedSlot::train);
    return nn::train(initial_model(config), train, tc);
}

nn::TrainResult retrain(const io::RunConfig& config, const nn::MlpModel& model, const prune::PruneMask& mask,
                        const nn::Dataset& train) {
    auto tc = config.train;
    tc.seed = stage_seed(config, SeedSlot::retrain);
    return nn::retrain_masked(nn::apply_mask(model, mask), mask, train, tc);
}

nn::ActivationDump capture(const io::RunConfig& config, const nn::MlpModel& model, const nn::Dataset& train) {
    return nn::capture_activations(model, train, config.samples_per_class, stage_seed(config, SeedSlot::sample),
                                   config.prune_input);
}

std::vector<prune::LayerShape> prune_shapes(const io::RunConfig& config, const nn::MlpModel& model) {
    auto shapes = model.shapes();
    if (config.prune_input) shapes.insert(shapes.begin(), prune::LayerShape{"input", model.input_width(), 0, 1});
    return shapes;
}

prune::PruneMask model_mask(const io::RunConfig& config, prune::PruneMask mask) {
    if (config.prune_input) {
        if (mask.layers.empty() || mask.layers.front().name != "input") throw ShapeError("mask lacks the input layer");
        mask.layers.erase(mask.layers.begin());
    }
    return mask;
}

std::vector<prune::PairScores> score_pairs(const io::RunConfig& config, const std::vector<prune::LayerShape>& shapes,
                                           const nn::ActivationDump& dump) {
    dump.validate();
    if (dump.layers.size() != shapes.size()) {
        throw ShapeError("activation dump has " + std::to_string(dump.layers.size()) + " layers, model has " +
                         std::to_string(shapes.size()));
    }
    const unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<prune::PairScores> pairs;
    for (std::size_t p = 0; p + 1 < shapes.size(); ++p) {
        const auto& producer = dump.layers[p].values;
        const auto& consumer = dump.layers[p + 1].values;
        if (producer.cols() != shapes[p].out || consumer.cols() != shapes[p + 1].out) {
            throw ShapeError("activation widths do not match layers " + shapes[p].name + "/" + shapes[p + 1].name);
        }
        const auto [gp, gc] = config.groups.for_pair(p, shapes[p].out, shapes[p + 1].out);
        auto pg = prune::group_filters(shapes[p].out, gp);
        auto cg = prune::group_filters(shapes[p + 1].out, gc);
        auto table = prune::compute_dependency_table(producer, consumer, pg, cg, p,
                                                     stage_seed(config, SeedSlot::gmi), threads);
        pairs.push_back({std::move(table), std::move(pg), std::move(cg)});
    }
    return pairs;
}

std::vector<prune::PairScores> attach_groupings(const std::vector<prune::LayerShape>& shapes,
                                                const std::vector<prune::DependencyTable>& tables) {
    if (tables.size() + 1 != shapes.size()) {
        throw ShapeError("expected " + std::to_string(shapes.size() - 1) + " dependency tables, found " +
                         std::to_string(tables.size()));
    }
    std::vector<prune::PairScores> pairs;
    for (std::size_t p = 0; p < tables.size(); ++p) {
        if (tables[p].pair_index != p) throw FormatError("dependency tables are not in pair order");
        pairs.push_back({tables[p], prune::group_filters(shapes[p].out, tables[p].producer_groups),
                         prune::group_filters(shapes[p + 1].out, tables[p].consumer_groups)});
    }
    return pairs;
}

PruneOutcome make_mask(const io::RunConfig& config, const std::vector<prune::LayerShape>& shapes,
                       const std::vector<prune::PairScores>& pairs) {
    PruneOutcome out;
    if (config.target_sparsity) {
        auto sol = prune::solve_delta_for_sparsity(shapes, pairs, *config.target_sparsity, config.gamma,
                                                   config.skip_layers);
        out.mask = model_mask(config, std::move(sol.mask));
        out.delta = sol.delta;
        out.scored_fraction = sol.achieved;
        out.unreachable = sol.unreachable;
        return out;
    }
    auto mask = prune::build_mask(shapes, pairs, {config.delta, config.gamma, config.skip_layers});
    out.scored_fraction = prune::scored_pruned_fraction(mask, shapes, pairs, config.skip_layers);
    out.mask = model_mask(config, std::move(mask));
    out.delta = config.delta;
    return out;
}

Report build_report(const nn::MlpModel& baseline, const nn::MlpModel& pruned, const nn::Dataset& test) {
    if (baseline.shapes() != pruned.shapes()) throw ShapeError("baseline and pruned models differ in shape");
    Report r;
    r.baseline_accuracy = nn::evaluate(baseline, test).accuracy;
    r.pruned_accuracy = nn::evaluate(pruned, test).accuracy;
    r.sparsity = prune::sparsity_report(nn::zero_pattern(pruned), pruned.shapes());
    r.baseline_footprint = nn::csr_footprint(baseline);
    r.pruned_footprint = nn::csr_footprint(pruned);
    return r;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::string mb(std::size_t bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f MB", static_cast<double>(bytes) / 1e6);
    return buf;
}

}  // namespace

std::string format_report(const Report& r) {
    std::ostringstream out;
    out << "baseline accuracy   " << pct(r.baseline_accuracy) << "\n"
        << "pruned accuracy     " << pct(r.pruned_accuracy) << "\n"
        << "params pruned       " << pct(r.sparsity.total_fraction()) << " of all parameters, "
        << pct(r.sparsity.weight_fraction()) << " of weights\n";
    for (const auto& l : r.sparsity.layers) {
        out << "  " << l.name << "  " << pct(l.pruned_fraction()) << " (" << l.zeroed << " / " << l.weights
            << " weights)\n";
    }
    out << "dense footprint     " << mb(r.baseline_footprint.dense_bytes) << "\n"
        << "sparse footprint    " << mb(r.pruned_footprint.sparse_bytes) << " (ratio "
        << std::to_string(static_cast<double>(r.pruned_footprint.sparse_bytes) /
                          static_cast<double>(r.baseline_footprint.dense_bytes))
        << ")\n";
    return out.str();
}

std::string format_sparsity_table(const prune::SparsityReport& report) {
    std::ostringstream out;
    out << "layer\tweights\tzeroed\tbiases\tpruned_fraction\n";
    for (const auto& l : report.layers) {
        out << l.name << '\t' << l.weights << '\t' << l.zeroed << '\t' << l.biases << '\t' << l.pruned_fraction()
            << '\n';
    }
    out << "total\t" << report.total_weights << '\t' << report.total_zeroed << '\t' << report.total_biases << '\t'
        << report.total_fraction() << '\n';
    return out.str();
}

}  // namespace mint::cli
