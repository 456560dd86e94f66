#include "mint/cli/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "mint/characterize/attack.hpp"
#include "mint/characterize/calibration.hpp"
#include "mint/cli/pipeline.hpp"
#include "mint/error.hpp"
#include "mint/gmi/estimator.hpp"
#include "mint/io/files.hpp"
#include "mint/io/formats.hpp"

namespace fs = std::filesystem;

namespace mint::cli {

namespace {

// Flags shared by every subcommand. Values stay unset unless given, so that
// config files only get overridden by flags the user actually typed.
struct Common {
    std::string config;
    std::string out = "mint-out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> data_dir;
    std::optional<double> delta;
    std::optional<double> gamma;
    std::optional<std::string> groups;
    std::optional<std::size_t> samples_per_class;
    std::optional<std::string> target_sparsity;
    std::optional<std::string> epsilons;
    std::optional<std::size_t> bins;
    std::vector<std::string> sets;
};

void add_common(CLI::App& app, Common& c) {
    app.add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", c.out, "output directory")->capture_default_str();
    app.add_option("--seed", c.seed, "master seed");
    app.add_option("--data-dir", c.data_dir, "MNIST directory (default $MINT_DATA_DIR)");
    app.add_option("--delta", c.delta, "score threshold");
    app.add_option("--gamma", c.gamma, "per-pair prune cap");
    app.add_option("--groups", c.groups, "G, or producer:consumer per pair");
    app.add_option("--samples-per-class", c.samples_per_class, "activation samples per class");
    app.add_option("--target-sparsity", c.target_sparsity, "solve delta for this pruned fraction, or 'none'");
    app.add_option("--epsilons", c.epsilons, "attack budgets, comma separated");
    app.add_option("--bins", c.bins, "calibration bins");
    app.add_option("--set", c.sets, "override any config key (key=value), repeatable");
}

io::RunConfig resolve(const Common& c) {
    io::RunConfig cfg = c.config.empty() ? io::RunConfig{} : io::read_config(c.config);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        io::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed) cfg.seed = *c.seed;
    if (c.data_dir) cfg.data_dir = *c.data_dir;
    if (c.delta) {
        cfg.delta = *c.delta;
        // an explicit threshold wins over the default sparsity target
        if (!c.target_sparsity) cfg.target_sparsity.reset();
    }
    if (c.gamma) cfg.gamma = *c.gamma;
    if (c.groups) io::set_config_value(cfg, "groups", *c.groups);
    if (c.samples_per_class) cfg.samples_per_class = *c.samples_per_class;
    if (c.target_sparsity) io::set_config_value(cfg, "target_sparsity", *c.target_sparsity);
    if (c.epsilons) io::set_config_value(cfg, "epsilons", *c.epsilons);
    if (c.bins) cfg.bins = *c.bins;
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const Common& c, const io::RunConfig& cfg, const std::string& command) {
    const fs::path out = c.out;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string());
    io::write_config(cfg, out / (command + ".config"));
    return out;
}

fs::path or_default(const std::string& given, const fs::path& fallback) { return given.empty() ? fallback : fs::path(given); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string trace_table(const std::vector<nn::EpochStats>& trace) {
    std::ostringstream t;
    t << "epoch\tlearning_rate\tloss\ttrain_accuracy\n";
    for (const auto& s : trace) t << s.epoch << '\t' << num(s.learning_rate) << '\t' << num(s.loss) << '\t' << num(s.accuracy) << '\n';
    return t.str();
}

std::vector<std::size_t> parse_columns(const std::string& text, const char* what) {
    std::vector<std::size_t> cols;
    if (text.empty()) return cols;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                cols.push_back(std::stoul(part));
            } else {
                const auto a = std::stoul(part.substr(0, dash));
                const auto b = std::stoul(part.substr(dash + 1));
                if (b < a) throw ConfigError(std::string(what) + ": empty range '" + part + "'");
                for (auto k = a; k <= b; ++k) cols.push_back(k);
            }
        } catch (const std::logic_error&) {
            throw ConfigError(std::string(what) + ": bad column list '" + text + "'");
        }
    }
    return cols;
}

// Whitespace/comma separated numeric rows; '#' starts a comment.
gmi::SampleMatrix read_sample_text(const fs::path& path) {
    std::istringstream in(io::read_text(path));
    std::string line;
    std::vector<double> data;
    std::size_t cols = 0, rows = 0, line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        for (auto& ch : line)
            if (ch == ',' || ch == '\t') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::logic_error&) {
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": not a number '" + tok + "'");
            }
        }
        if (row.empty()) continue;
        if (cols == 0) cols = row.size();
        if (row.size() != cols) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
        data.insert(data.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw FormatError(path.string() + ": no samples");
    gmi::SampleMatrix m(rows, cols, std::move(data));
    m.require_finite();
    return m;
}

int cmd_train(const Common& c, std::ostream& out) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "train");
    const auto data = load_data(cfg);
    const auto result = train_baseline(cfg, data.train);
    io::write_model(result.model, dir / "model.mdl");
    io::write_text(dir / "train_trace.tsv", trace_table(result.trace));
    out << "test accuracy " << num(nn::evaluate(result.model, data.test).accuracy) << "\n"
        << "wrote " << (dir / "model.mdl").string() << "\n";
    return 0;
}

int cmd_activations(const Common& c, const std::string& model_path, std::ostream& out) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "activations");
    const auto model = io::read_model(or_default(model_path, dir / "model.mdl"));
    const auto data = load_data(cfg);
    const auto dump = capture(cfg, model, data.train);
    io::write_activations(dump, dir / "activations.mact");
    out << "captured " << dump.layers.size() << " layers x " << dump.rows() << " rows\n";
    return 0;
}

int cmd_deps(const Common& c, const std::string& model_path, const std::string& acts_path, std::ostream& out) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "deps");
    const auto model = io::read_model(or_default(model_path, dir / "model.mdl"));
    const auto dump = io::read_activations(or_default(acts_path, dir / "activations.mact"));
    const auto pairs = score_pairs(cfg, prune_shapes(cfg, model), dump);
    std::vector<prune::DependencyTable> tables;
    for (const auto& p : pairs) tables.push_back(p.table);
    io::write_text(dir / "deps.tsv", io::encode_tables(tables));
    for (const auto& t : tables) {
        out << "pair " << t.pair_index << ": " << t.consumer_groups << " x " << t.producer_groups << " scores\n";
    }
    return 0;
}

int cmd_prune(const Common& c, const std::string& model_path, const std::string& deps_path, std::ostream& out,
              std::ostream& err) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "prune");
    const auto model = io::read_model(or_default(model_path, dir / "model.mdl"));
    const auto shapes = prune_shapes(cfg, model);
    const auto pairs = attach_groupings(shapes, io::decode_tables(io::read_text(or_default(deps_path, dir / "deps.tsv"))));
    const auto outcome = make_mask(cfg, shapes, pairs);
    io::write_mask(outcome.mask, dir / "mask.txt");
    const auto sparsity = prune::sparsity_report(outcome.mask, model.shapes());
    io::write_text(dir / "mask_sparsity.tsv", format_sparsity_table(sparsity));
    if (outcome.unreachable) err << "warning: target sparsity is not reachable under gamma; using the best mask\n";
    out << "delta " << num(outcome.delta) << "\n"
        << "scored weights pruned " << num(outcome.scored_fraction) << "\n"
        << "all parameters pruned " << num(sparsity.total_fraction()) << "\n";
    return 0;
}

int cmd_retrain(const Common& c, const std::string& model_path, const std::string& mask_path, std::ostream& out) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "retrain");
    const auto model = io::read_model(or_default(model_path, dir / "model.mdl"));
    const auto mask = io::read_mask(or_default(mask_path, dir / "mask.txt"));
    const auto data = load_data(cfg);
    const auto result = retrain(cfg, model, mask, data.train);
    io::write_model(result.model, dir / "pruned.mdl");
    io::write_text(dir / "retrain_trace.tsv", trace_table(result.trace));
    out << "test accuracy " << num(nn::evaluate(result.model, data.test).accuracy) << "\n"
        << "wrote " << (dir / "pruned.mdl").string() << "\n";
    return 0;
}

std::string footprint_table(const nn::Footprint& base, const nn::Footprint& pruned) {
    std::ostringstream t;
    t << "layer\tdense_bytes\tsparse_bytes\n";
    for (std::size_t k = 0; k < pruned.layers.size(); ++k) {
        t << pruned.layers[k].name << '\t' << base.layers[k].dense_bytes << '\t' << pruned.layers[k].sparse_bytes << '\n';
    }
    t << "total\t" << base.dense_bytes << '\t' << pruned.sparse_bytes << '\n';
    return t.str();
}

int cmd_report(const Common& c, const std::string& model_path, const std::string& pruned_path, std::ostream& out) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "report");
    const auto baseline = io::read_model(or_default(model_path, dir / "model.mdl"));
    const auto pruned = io::read_model(or_default(pruned_path, dir / "pruned.mdl"));
    const auto data = load_data(cfg);
    const auto report = build_report(baseline, pruned, data.test);
    const auto text = format_report(report);
    io::write_text(dir / "report.txt", text);
    io::write_text(dir / "sparsity.tsv", format_sparsity_table(report.sparsity));
    io::write_text(dir / "footprint.tsv", footprint_table(report.baseline_footprint, report.pruned_footprint));
    out << text;
    return 0;
}

int cmd_estimate(const Common& c, const std::string& input, const std::string& xs, const std::string& ys,
                 const std::string& zs, std::ostream& out) {
    const auto cfg = resolve(c);
    prepare_out(c, cfg, "estimate");
    const auto samples = read_sample_text(input);
    gmi::BlockSpec spec;
    spec.x = xs.empty() ? std::vector<std::size_t>{0} : parse_columns(xs, "--x");
    spec.z = parse_columns(zs, "--z");
    if (ys.empty()) {
        for (std::size_t col = 0; col < samples.cols(); ++col) {
            if (std::find(spec.x.begin(), spec.x.end(), col) == spec.x.end() &&
                std::find(spec.z.begin(), spec.z.end(), col) == spec.z.end()) {
                spec.y.push_back(col);
            }
        }
    } else {
        spec.y = parse_columns(ys, "--y");
    }
    // the estimator wants the blocks to tile the matrix, so keep only the named columns
    std::vector<std::size_t> used;
    for (const auto* block : {&spec.x, &spec.y, &spec.z}) {
        for (std::size_t col : *block) {
            if (col >= samples.cols()) {
                throw ConfigError("column " + std::to_string(col) + " is outside the " +
                                  std::to_string(samples.cols()) + "-column input");
            }
            used.push_back(col);
        }
    }
    gmi::SampleMatrix picked(samples.rows(), used.size());
    for (std::size_t r = 0; r < samples.rows(); ++r)
        for (std::size_t c = 0; c < used.size(); ++c) picked(r, c) = samples(r, used[c]);
    gmi::BlockSpec local;
    std::size_t next = 0;
    for (auto [from, to] : {std::pair{&spec.x, &local.x}, std::pair{&spec.y, &local.y}, std::pair{&spec.z, &local.z}}) {
        for (std::size_t k = 0; k < from->size(); ++k) to->push_back(next++);
    }
    const auto score = gmi::estimate(picked, local, stage_seed(cfg, SeedSlot::gmi));
    out << (spec.z.empty() ? "gmi " : "conditional_gmi ") << num(score.value) << "\n"
        << "fr_count " << score.raw_fr_count << "\n"
        << "subset_size " << score.subset_size << "\n";
    return 0;
}

int cmd_characterize(const Common& c, const std::string& model_path, const std::string& pruned_path,
                     const std::string& mode, std::ostream& out) {
    const auto cfg = resolve(c);
    const auto dir = prepare_out(c, cfg, "characterize");
    std::vector<std::pair<std::string, nn::MlpModel>> models;
    models.emplace_back("baseline", io::read_model(or_default(model_path, dir / "model.mdl")));
    const fs::path pruned = or_default(pruned_path, dir / "pruned.mdl");
    if (!pruned_path.empty() || fs::exists(pruned)) models.emplace_back("pruned", io::read_model(pruned));
    const auto data = load_data(cfg);

    std::vector<characterize::AttackMode> modes;
    if (mode == "untargeted" || mode == "both") modes.push_back(characterize::AttackMode::untargeted_fgsm);
    if (mode == "least_likely" || mode == "both") modes.push_back(characterize::AttackMode::least_likely);

    std::ostringstream curve, bins;
    curve << "model\tattack\tepsilon\taccuracy\n";
    bins << "model\tbin_lower\tbin_upper\tcount\tmean_confidence\taccuracy\n";
    for (const auto& [name, model] : models) {
        const auto ev = nn::evaluate(model, data.test);
        const auto profile = characterize::ece(ev.confidences, ev.correct, cfg.bins);
        for (const auto& b : profile.bins) {
            bins << name << '\t' << num(b.lower) << '\t' << num(b.upper) << '\t' << b.count << '\t'
                 << num(b.mean_confidence) << '\t' << num(b.accuracy) << '\n';
        }
        out << name << " accuracy " << num(ev.accuracy) << " ece " << num(profile.ece) << "\n";
        for (auto m : modes) {
            characterize::AttackConfig ac;
            ac.steps = cfg.attack_steps;
            ac.mode = m;
            const auto points = characterize::attack_curve(model, data.test, cfg.epsilons, ac, cfg.attack_samples,
                                                           stage_seed(cfg, SeedSlot::attack));
            const char* label = m == characterize::AttackMode::untargeted_fgsm ? "untargeted" : "least_likely";
            for (const auto& p : points) {
                curve << name << '\t' << label << '\t' << num(p.epsilon) << '\t' << num(p.accuracy) << '\n';
                out << "  " << label << " eps " << num(p.epsilon) << " accuracy " << num(p.accuracy) << "\n";
            }
        }
    }
    io::write_text(dir / "attack_curve.tsv", curve.str());
    io::write_text(dir / "reliability.tsv", bins.str());
    return 0;
}

int cmd_sweep(const Common& c, const std::string& model_path, const std::string& param, const std::string& values,
              bool do_retrain, std::ostream& out) {
    const auto base_cfg = resolve(c);
    const auto dir = prepare_out(c, base_cfg, "sweep");
    const auto model = io::read_model(or_default(model_path, dir / "model.mdl"));
    const auto data = load_data(base_cfg);

    std::vector<std::string> settings;
    std::stringstream ss(values);
    for (std::string v; std::getline(ss, v, ';');)
        if (!v.empty()) settings.push_back(v);
    if (settings.empty()) throw ConfigError("sweep: no values given");

    std::ostringstream table;
    table << param << "\tdelta\tscored_pruned\ttotal_pruned\taccuracy\n";
    for (const auto& v : settings) {
        auto cfg = base_cfg;
        io::set_config_value(cfg, param, v);
        cfg.validate();
        const auto shapes = prune_shapes(cfg, model);
        const auto pairs = score_pairs(cfg, shapes, capture(cfg, model, data.train));
        const auto outcome = make_mask(cfg, shapes, pairs);
        const auto pruned = do_retrain ? retrain(cfg, model, outcome.mask, data.train).model
                                       : nn::apply_mask(model, outcome.mask);
        const double acc = nn::evaluate(pruned, data.test).accuracy;
        const double total = prune::sparsity_report(outcome.mask, model.shapes()).total_fraction();
        table << v << '\t' << num(outcome.delta) << '\t' << num(outcome.scored_fraction) << '\t' << num(total) << '\t'
              << num(acc) << '\n';
        out << param << "=" << v << " delta " << num(outcome.delta) << " pruned " << num(total) << " accuracy "
            << num(acc) << "\n";
    }
    io::write_text(dir / "sweep.tsv", table.str());
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Filter pruning by conditional geometric mutual information", "mint"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    Common common;
    std::string model, pruned, activations, deps, mask, input, xs, ys, zs, param, values;
    std::string mode = "both";
    bool no_retrain = false;

    auto* train = app.add_subcommand("train", "train the baseline model");
    auto* acts = app.add_subcommand("activations", "capture class-stratified activations");
    auto* dep = app.add_subcommand("deps", "score every layer pair");
    auto* prn = app.add_subcommand("prune", "threshold the scores into a mask");
    auto* ret = app.add_subcommand("retrain", "retrain with the mask held fixed");
    auto* rep = app.add_subcommand("report", "accuracy, sparsity and footprint");
    auto* est = app.add_subcommand("estimate", "GMI of columns in a numeric text file");
    auto* chr = app.add_subcommand("characterize", "calibration and adversarial robustness");
    auto* swp = app.add_subcommand("sweep", "vary one setting, prune, and evaluate");
    for (auto* sub : {train, acts, dep, prn, ret, rep, est, chr, swp}) add_common(*sub, common);

    for (auto* sub : {acts, dep, prn, ret, rep, chr, swp}) sub->add_option("--model", model, "baseline model file");
    dep->add_option("--activations", activations, "activation file");
    prn->add_option("--deps", deps, "dependency table file");
    ret->add_option("--mask", mask, "mask file");
    rep->add_option("--pruned", pruned, "pruned model file");
    chr->add_option("--pruned", pruned, "pruned model file");
    chr->add_option("--attack", mode, "untargeted, least_likely or both")
        ->check(CLI::IsMember({"untargeted", "least_likely", "both"}));
    est->add_option("--input", input, "numeric text file, one sample per row")->required();
    est->add_option("--x", xs, "X columns, e.g. 0 or 0-3 (default 0)");
    est->add_option("--y", ys, "Y columns (default: all columns not in X or Z)");
    est->add_option("--z", zs, "conditioning columns (default none)");
    swp->add_option("--param", param, "groups or samples_per_class")->required()
        ->check(CLI::IsMember({"groups", "samples_per_class"}));
    swp->add_option("--values", values, "settings separated by ';'")->required();
    swp->add_flag("--no-retrain", no_retrain, "evaluate the masked model without retraining");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        err << app.help();
        return 2;
    }

    try {
        if (*train) return cmd_train(common, out);
        if (*acts) return cmd_activations(common, model, out);
        if (*dep) return cmd_deps(common, model, activations, out);
        if (*prn) return cmd_prune(common, model, deps, out, err);
        if (*ret) return cmd_retrain(common, model, mask, out);
        if (*rep) return cmd_report(common, model, pruned, out);
        if (*est) return cmd_estimate(common, input, xs, ys, zs, out);
        if (*chr) return cmd_characterize(common, model, pruned, mode, out);
        if (*swp) return cmd_sweep(common, model, param, values, !no_retrain, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace mint::cli
