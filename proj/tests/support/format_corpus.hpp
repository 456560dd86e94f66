#pragma once

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mint/error.hpp"
#include "mint/io/config.hpp"
#include "mint/io/formats.hpp"

namespace mint::testing {

struct CorruptCase {
    std::string file;
    std::string kind;
    std::string expected;  // format | corruption | config
    std::string observed;  // error class actually raised, or "none"
    bool passed() const { return expected == observed; }
};

inline std::string error_class(const std::function<void()>& f) {
    try {
        f();
    } catch (const FormatError&) {
        return "format";
    } catch (const CorruptionError&) {
        return "corruption";
    } catch (const ConfigError&) {
        return "config";
    } catch (const std::exception& e) {
        return std::string("other: ") + e.what();
    }
    return "none";
}

/// Loads every fixture listed in corrupt/manifest.tsv with the matching reader.
inline std::vector<CorruptCase> run_corrupt_corpus(const std::filesystem::path& fixtures) {
    const auto dir = fixtures / "corrupt";
    std::ifstream manifest(dir / "manifest.tsv");
    if (!manifest) throw IoError("missing corrupt/manifest.tsv under " + fixtures.string());
    std::string line;
    std::getline(manifest, line);
    std::vector<CorruptCase> cases;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        CorruptCase c;
        std::getline(ls, c.file, '\t');
        std::getline(ls, c.kind, '\t');
        std::getline(ls, c.expected, '\t');
        const auto path = dir / c.file;
        c.observed = error_class([&] {
            if (c.kind == "activations") io::read_activations(path);
            else if (c.kind == "model") io::read_model(path);
            else if (c.kind == "mask") io::read_mask(path);
            else if (c.kind == "config") io::read_config(path);
            else if (c.kind == "idx") io::read_mnist_idx(path, std::filesystem::path(path).replace_extension(".labels"));
            else throw IoError("unknown fixture kind " + c.kind);
        });
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace mint::testing
