#include "mint/io/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "mint/error.hpp"
#include "mint/io/files.hpp"

namespace mint::io {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

template <typename T>
T parse_int(const std::string& key, const std::string& text) {
    T v{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    return v;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& text, F item) {
    std::vector<T> out;
    if (trim(text).empty()) return out;
    for (const auto& part : split(text, ',')) {
        if (part.empty()) throw ConfigError(key + ": empty list entry");
        out.push_back(item(key, part));
    }
    return out;
}

std::string fmt(double v) {
    // shortest text that parses back to the same double
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename C, typename F>
std::string join(const C& items, F f) {
    std::string out;
    for (const auto& x : items) {
        if (!out.empty()) out += ',';
        out += f(x);
    }
    return out;
}

struct Key {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key size_key(T RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_int<T>(k, v); },
            [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Key double_key(double RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = parse_double(k, v); },
            [member](const RunConfig& c) { return fmt(c.*member); }};
}

Key bool_key(bool RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) {
                if (v == "true" || v == "1") c.*member = true;
                else if (v == "false" || v == "0") c.*member = false;
                else throw ConfigError(k + ": expected true or false, got '" + v + "'");
            },
            [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Key string_key(std::string RunConfig::*member) {
    return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; },
            [member](const RunConfig& c) { return c.*member; }};
}

// Ordered registry: the order here is the order format_config writes.
const std::vector<std::pair<std::string, Key>>& registry() {
    static const std::vector<std::pair<std::string, Key>> keys = [] {
        std::vector<std::pair<std::string, Key>> k;
        k.emplace_back("seed", size_key(&RunConfig::seed));
        k.emplace_back("dataset", string_key(&RunConfig::dataset));
        k.emplace_back("data_dir", string_key(&RunConfig::data_dir));
        k.emplace_back("blobs_classes", size_key(&RunConfig::blobs_classes));
        k.emplace_back("blobs_per_class", size_key(&RunConfig::blobs_per_class));
        k.emplace_back("blobs_dims", size_key(&RunConfig::blobs_dims));
        k.emplace_back("blobs_radius", double_key(&RunConfig::blobs_radius));
        k.emplace_back("blobs_spread", double_key(&RunConfig::blobs_spread));
        k.emplace_back("blobs_test_per_class", size_key(&RunConfig::blobs_test_per_class));
        k.emplace_back("widths", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                         c.widths = parse_list<std::size_t>(key, v, parse_int<std::size_t>);
                                     },
                                     [](const RunConfig& c) {
                                         return join(c.widths, [](std::size_t w) { return std::to_string(w); });
                                     }});
        k.emplace_back("epochs", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                         c.train.epochs = parse_int<std::size_t>(key, v);
                                     },
                                     [](const RunConfig& c) { return std::to_string(c.train.epochs); }});
        k.emplace_back("batch_size", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                             c.train.batch_size = parse_int<std::size_t>(key, v);
                                         },
                                         [](const RunConfig& c) { return std::to_string(c.train.batch_size); }});
        auto train_double = [](double nn::TrainConfig::*member) {
            return Key{[member](RunConfig& c, const std::string& key, const std::string& v) {
                           c.train.*member = parse_double(key, v);
                       },
                       [member](const RunConfig& c) { return fmt(c.train.*member); }};
        };
        k.emplace_back("learning_rate", train_double(&nn::TrainConfig::learning_rate));
        k.emplace_back("milestones", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                             c.train.milestones = parse_list<std::size_t>(key, v, parse_int<std::size_t>);
                                         },
                                         [](const RunConfig& c) {
                                             return join(c.train.milestones,
                                                         [](std::size_t m) { return std::to_string(m); });
                                         }});
        k.emplace_back("lr_multiplier", train_double(&nn::TrainConfig::lr_multiplier));
        k.emplace_back("weight_decay", train_double(&nn::TrainConfig::weight_decay));
        k.emplace_back("momentum", train_double(&nn::TrainConfig::momentum));
        k.emplace_back("prune_input", bool_key(&RunConfig::prune_input));
        k.emplace_back("groups", Key{[](RunConfig& c, const std::string&, const std::string& v) {
                                         c.groups = GroupSpec::parse(v);
                                     },
                                     [](const RunConfig& c) { return c.groups.to_string(); }});
        k.emplace_back("samples_per_class", size_key(&RunConfig::samples_per_class));
        k.emplace_back("delta", double_key(&RunConfig::delta));
        k.emplace_back("gamma", double_key(&RunConfig::gamma));
        k.emplace_back("skip_layers", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                              auto items = parse_list<std::size_t>(key, v, parse_int<std::size_t>);
                                              c.skip_layers = {items.begin(), items.end()};
                                          },
                                          [](const RunConfig& c) {
                                              return join(c.skip_layers, [](std::size_t s) { return std::to_string(s); });
                                          }});
        k.emplace_back("target_sparsity", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                                  if (v == "none" || v.empty()) c.target_sparsity.reset();
                                                  else c.target_sparsity = parse_double(key, v);
                                              },
                                              [](const RunConfig& c) {
                                                  return c.target_sparsity ? fmt(*c.target_sparsity) : std::string("none");
                                              }});
        k.emplace_back("threads", size_key(&RunConfig::threads));
        k.emplace_back("epsilons", Key{[](RunConfig& c, const std::string& key, const std::string& v) {
                                           c.epsilons = parse_list<double>(key, v, parse_double);
                                       },
                                       [](const RunConfig& c) { return join(c.epsilons, fmt); }});
        k.emplace_back("attack_steps", size_key(&RunConfig::attack_steps));
        k.emplace_back("attack_samples", size_key(&RunConfig::attack_samples));
        k.emplace_back("bins", size_key(&RunConfig::bins));
        return k;
    }();
    return keys;
}

const Key& lookup(const std::string& key) {
    for (const auto& [name, k] : registry())
        if (name == key) return k;
    throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

GroupSpec GroupSpec::parse(const std::string& text) {
    const auto t = trim(text);
    if (t.empty()) throw ConfigError("groups: empty value");
    GroupSpec g;
    if (t.find(':') == std::string::npos) {
        g.uniform = parse_int<std::size_t>("groups", t);
        if (*g.uniform == 0) throw ConfigError("groups: G must be at least 1");
        return g;
    }
    for (const auto& part : split(t, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw ConfigError("groups: expected 'producer:consumer', got '" + part + "'");
        const auto p = parse_int<std::size_t>("groups", trim(part.substr(0, colon)));
        const auto c = parse_int<std::size_t>("groups", trim(part.substr(colon + 1)));
        if (p == 0 || c == 0) throw ConfigError("groups: G must be at least 1");
        g.per_pair.emplace_back(p, c);
    }
    return g;
}

std::string GroupSpec::to_string() const {
    if (uniform) return std::to_string(*uniform);
    return join(per_pair, [](const auto& pc) { return std::to_string(pc.first) + ":" + std::to_string(pc.second); });
}

std::pair<std::size_t, std::size_t> GroupSpec::for_pair(std::size_t p, std::size_t producer_width,
                                                        std::size_t consumer_width) const {
    if (uniform) return {std::min(*uniform, producer_width), std::min(*uniform, consumer_width)};
    if (p >= per_pair.size()) {
        throw ConfigError("groups: no entry for layer pair " + std::to_string(p) + " (" +
                          std::to_string(per_pair.size()) + " given)");
    }
    return per_pair[p];
}

void RunConfig::validate() const {
    if (dataset != "mnist" && dataset != "blobs") throw ConfigError("dataset must be 'mnist' or 'blobs'");
    if (widths.size() < 2) throw ConfigError("widths needs at least an input and an output width");
    for (auto w : widths)
        if (w == 0) throw ConfigError("widths must be positive");
    try {
        train.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const std::size_t pairs = pair_count();
    if (!groups.uniform && groups.per_pair.size() != pairs) {
        throw ConfigError("groups lists " + std::to_string(groups.per_pair.size()) + " pairs but the model has " +
                          std::to_string(pairs));
    }
    const auto pw = pair_widths();
    for (std::size_t p = 0; p < pairs && !groups.uniform; ++p) {
        const auto [gp, gc] = groups.per_pair[p];
        if (gp > pw[p] || gc > pw[p + 1]) {
            throw ConfigError("groups for pair " + std::to_string(p) + " exceed the layer widths");
        }
    }
    if (samples_per_class == 0) throw ConfigError("samples_per_class must be at least 1");
    if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    for (auto s : skip_layers)
        if (s >= pairs) throw ConfigError("skip_layers entry " + std::to_string(s) + " is not a layer pair");
    if (target_sparsity && !(*target_sparsity >= 0.0 && *target_sparsity < 1.0)) {
        throw ConfigError("target_sparsity must lie in [0, 1)");
    }
    if (epsilons.empty()) throw ConfigError("epsilons must not be empty");
    for (double e : epsilons)
        if (e < 0.0) throw ConfigError("epsilons must be non-negative");
    if (attack_steps == 0) throw ConfigError("attack_steps must be at least 1");
    if (attack_samples == 0) throw ConfigError("attack_samples must be at least 1");
    if (bins == 0) throw ConfigError("bins must be at least 1");
    if (blobs_classes < 2 || blobs_per_class == 0 || blobs_dims < 2 || !(blobs_spread > 0.0)) {
        throw ConfigError("blobs parameters are out of range");
    }
    if (blobs_test_per_class >= blobs_per_class) throw ConfigError("blobs_test_per_class must be below blobs_per_class");
}

std::vector<std::size_t> RunConfig::pair_widths() const {
    if (prune_input) return widths;
    return {widths.begin() + 1, widths.end()};
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    lookup(key).set(config, key, trim(value));
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        if (!seen.insert(key).second) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        set_config_value(base, key, line.substr(eq + 1));
    }
    return base;
}

RunConfig read_config(const std::filesystem::path& path, RunConfig base) { return parse_config(read_text(path), std::move(base)); }

std::string format_config(const RunConfig& config) {
    std::string out;
    for (const auto& [name, k] : registry()) out += name + "=" + k.get(config) + "\n";
    return out;
}

void write_config(const RunConfig& config, const std::filesystem::path& path) { write_text(path, format_config(config)); }

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [name, k] : registry()) out.push_back(name);
    return out;
}

}  // namespace mint::io
