#include "mint/io/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "byte_stream.hpp"
#include "mint/error.hpp"
#include "mint/io/files.hpp"

namespace mint::io {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
        if (len == 0 || i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
        i += len;
    }
    return true;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// shortest decimal that reads back as the same double
std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > 0xffffffffULL) throw FormatError(std::string(what) + " does not fit in 32 bits");
    return static_cast<std::uint32_t>(v);
}

constexpr std::size_t kMaxNameBytes = 4096;

}  // namespace

std::uint64_t activation_checksum(const gmi::SampleMatrix& values) {
    ByteWriter w;
    for (double v : values.data()) w.f32(static_cast<float>(v));
    return fnv1a64(w.bytes());
}

std::vector<std::uint8_t> encode_activations(const nn::ActivationDump& dump, bool embed_checksums) {
    dump.validate();
    ByteWriter w;
    w.raw(kActivationMagic);
    for (const auto& layer : dump.layers) {
        const auto m = layer.values.rows();
        if (m == 0) throw FormatError("layer '" + layer.name + "' has no samples");
        if (layer.name.empty() || !valid_utf8(layer.name) || layer.name.find(kChecksumTag) != std::string::npos) {
            throw FormatError("invalid layer name '" + layer.name + "'");
        }
        std::string name = layer.name;
        if (embed_checksums) name += std::string(kChecksumTag) + hex64(activation_checksum(layer.values));
        if (name.size() > kMaxNameBytes) throw FormatError("layer name too long");
        w.u32(checked_u32(name.size(), "name length"));
        w.raw(name);
        w.u32(checked_u32(m, "sample count"));
        w.u32(checked_u32(layer.values.cols(), "filter count"));
        for (auto label : dump.labels) {
            if (label >= 0xffff) throw FormatError("class label " + std::to_string(label) + " exceeds 16 bits");
            w.u16(static_cast<std::uint16_t>(label));
        }
        for (double v : layer.values.data()) {
            const float f = static_cast<float>(v);
            if (static_cast<double>(f) != v) {
                throw FormatError("layer '" + layer.name + "' holds values that are not float32-exact");
            }
            w.f32(f);
        }
    }
    return w.bytes();
}

nn::ActivationDump decode_activations(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kActivationMagic.size() ||
        std::string_view(reinterpret_cast<const char*>(bytes.data()), kActivationMagic.size()) != kActivationMagic) {
        throw FormatError("not a MINTACT1 activation file");
    }
    ByteReader r(bytes.data(), bytes.size(), "activation file");
    r.raw(kActivationMagic.size());
    nn::ActivationDump dump;
    bool first = true;
    while (!r.done()) {
        const auto name_len = r.u32();
        if (name_len == 0 || name_len > kMaxNameBytes) throw FormatError("bad layer name length " + std::to_string(name_len));
        std::string name(r.raw(name_len));
        if (!valid_utf8(name)) throw FormatError("layer name is not valid UTF-8");
        const auto m = r.u32();
        const auto n = r.u32();
        if (m == 0) throw FormatError("layer '" + name + "' declares zero samples");
        const std::uint64_t payload = 2ULL * m + 4ULL * m * n;
        if (payload > r.remaining()) {
            throw CorruptionError("layer '" + name + "' declares " + std::to_string(payload) +
                                  " payload bytes but only " + std::to_string(r.remaining()) + " remain");
        }
        std::vector<std::uint32_t> labels(m);
        for (auto& l : labels) {
            l = r.u16();
            if (l == 0xffff) throw FormatError("class label 65535 is reserved");
        }
        if (first) {
            dump.labels = labels;
            first = false;
        } else if (labels != dump.labels) {
            throw FormatError("layer '" + name + "' disagrees with earlier layers on labels");
        }
        std::vector<double> values(static_cast<std::size_t>(m) * n);
        for (auto& v : values) v = r.f32();
        gmi::SampleMatrix matrix(m, n, std::move(values));

        if (auto at = name.find(kChecksumTag); at != std::string::npos) {
            const auto hex = name.substr(at + kChecksumTag.size());
            std::uint64_t expected = 0;
            auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), expected, 16);
            if (hex.size() != 16 || ec != std::errc() || p != hex.data() + hex.size()) {
                throw FormatError("malformed checksum suffix on layer '" + name + "'");
            }
            if (activation_checksum(matrix) != expected) {
                throw CorruptionError("checksum mismatch on layer '" + name.substr(0, at) + "'");
            }
            name.resize(at);
        }
        for (const auto& l : dump.layers)
            if (l.name == name) throw FormatError("duplicate layer '" + name + "'");
        dump.layers.push_back({std::move(name), std::move(matrix)});
    }
    return dump;
}

void write_activations(const nn::ActivationDump& dump, const std::filesystem::path& path, bool embed_checksums) {
    write_bytes(path, encode_activations(dump, embed_checksums));
}

nn::ActivationDump read_activations(const std::filesystem::path& path) { return decode_activations(read_bytes(path)); }

std::vector<std::uint8_t> encode_model(const nn::MlpModel& model) {
    model.validate();
    ByteWriter w;
    w.raw(kModelMagic);
    w.u32(checked_u32(model.layer_count(), "layer count"));
    for (const auto& l : model.layers()) {
        w.u32(checked_u32(l.out, "N_out"));
        w.u32(checked_u32(l.in, "N_in"));
        w.u8(static_cast<std::uint8_t>(l.activation));
        for (float v : l.weights) w.f32(v);
        for (float v : l.bias) w.f32(v);
    }
    return w.bytes();
}

nn::MlpModel decode_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kModelMagic.size() ||
        std::string_view(reinterpret_cast<const char*>(bytes.data()), kModelMagic.size()) != kModelMagic) {
        throw FormatError("not a MINTMDL1 model file");
    }
    ByteReader r(bytes.data(), bytes.size(), "model file");
    r.raw(kModelMagic.size());
    const auto count = r.u32();
    if (count == 0) throw FormatError("model file declares no layers");
    std::vector<nn::DenseLayer> layers;
    for (std::uint32_t k = 0; k < count; ++k) {
        nn::DenseLayer l;
        l.out = r.u32();
        l.in = r.u32();
        const auto tag = r.u8();
        if (tag > 1) throw FormatError("unknown activation tag " + std::to_string(tag));
        l.activation = static_cast<nn::Activation>(tag);
        const std::uint64_t payload = 4ULL * l.out * l.in + 4ULL * l.out;
        if (payload > r.remaining()) throw CorruptionError("layer " + std::to_string(k) + " payload is truncated");
        l.weights.resize(l.out * l.in);
        for (auto& v : l.weights) v = r.f32();
        l.bias.resize(l.out);
        for (auto& v : l.bias) v = r.f32();
        layers.push_back(std::move(l));
    }
    if (!r.done()) throw CorruptionError(std::to_string(r.remaining()) + " trailing bytes after the last layer");
    try {
        return nn::MlpModel(std::move(layers));
    } catch (const ShapeError& e) {
        throw FormatError(std::string("model file: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
}

void write_model(const nn::MlpModel& model, const std::filesystem::path& path) { write_bytes(path, encode_model(model)); }
nn::MlpModel read_model(const std::filesystem::path& path) { return decode_model(read_bytes(path)); }

std::string encode_mask(const prune::PruneMask& mask) {
    std::ostringstream out;
    out << kMaskMagic << "\nlayers " << mask.layers.size() << "\n";
    for (const auto& l : mask.layers) {
        if (l.name.empty() || l.name.find_first_of(" \t\n\r") != std::string::npos) {
            throw FormatError("mask layer name must be a single token: '" + l.name + "'");
        }
        if (l.keep.size() != l.rows * l.cols) throw ShapeError("mask layer '" + l.name + "' has the wrong size");
        out << "layer " << l.name << ' ' << l.rows << ' ' << l.cols << " groups " << l.consumer_groups << ' '
            << l.producer_groups << " delta ";
        if (l.delta) {
            out << shortest(*l.delta);
        } else {
            out << '-';
        }
        out << '\n';
        std::string row(l.cols, '0');
        for (std::size_t r = 0; r < l.rows; ++r) {
            for (std::size_t c = 0; c < l.cols; ++c) row[c] = l.at(r, c) ? '1' : '0';
            out << row << '\n';
        }
    }
    return out.str();
}

namespace {

std::size_t parse_count(const std::string& token, const char* what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || p != token.data() + token.size()) {
        throw FormatError(std::string("mask file: bad ") + what + " '" + token + "'");
    }
    return v;
}

}  // namespace

prune::PruneMask decode_mask(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto next = [&](const char* expect) {
        if (!std::getline(in, line)) throw FormatError(std::string("mask file: missing ") + expect);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    next("header");
    if (line != kMaskMagic) throw FormatError("not a MINTMASK1 mask file");
    next("layer count");
    std::istringstream head(line);
    std::string word, count_tok, extra;
    head >> word >> count_tok;
    if (word != "layers" || (head >> extra)) throw FormatError("mask file: expected 'layers <count>'");
    const auto count = parse_count(count_tok, "layer count");

    prune::PruneMask mask;
    for (std::size_t k = 0; k < count; ++k) {
        next("layer header");
        std::istringstream h(line);
        std::string kw, name, rows_tok, cols_tok, gkw, cg_tok, pg_tok, dkw, delta_tok;
        h >> kw >> name >> rows_tok >> cols_tok >> gkw >> cg_tok >> pg_tok >> dkw >> delta_tok;
        if (kw != "layer" || gkw != "groups" || dkw != "delta" || delta_tok.empty() || (h >> extra)) {
            throw FormatError("mask file line " + std::to_string(line_no) + ": malformed layer header");
        }
        prune::LayerMask l;
        l.name = name;
        l.rows = parse_count(rows_tok, "row count");
        l.cols = parse_count(cols_tok, "column count");
        l.consumer_groups = parse_count(cg_tok, "group count");
        l.producer_groups = parse_count(pg_tok, "group count");
        if (l.consumer_groups == 0 || l.consumer_groups > l.rows || l.producer_groups == 0 ||
            l.producer_groups > l.cols) {
            throw FormatError("mask file: layer '" + name + "' has impossible group counts");
        }
        if (delta_tok != "-") {
            double d = 0.0;
            auto [p, ec] = std::from_chars(delta_tok.data(), delta_tok.data() + delta_tok.size(), d);
            if (ec != std::errc() || p != delta_tok.data() + delta_tok.size() || !(d >= 0.0 && d <= 1.0)) {
                throw FormatError("mask file: bad delta '" + delta_tok + "'");
            }
            l.delta = d;
        }
        l.keep.reserve(l.rows * l.cols);
        for (std::size_t r = 0; r < l.rows; ++r) {
            next("mask row");
            if (line.size() != l.cols) {
                throw FormatError("mask file line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(l.cols) + " columns, found " + std::to_string(line.size()));
            }
            for (char c : line) {
                if (c != '0' && c != '1') {
                    throw FormatError("mask file line " + std::to_string(line_no) + ": unexpected character");
                }
                l.keep.push_back(c == '1');
            }
        }
        mask.layers.push_back(std::move(l));
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line != "\r") throw FormatError("mask file: content after the last layer");
    }
    return mask;
}

void write_mask(const prune::PruneMask& mask, const std::filesystem::path& path) { write_text(path, encode_mask(mask)); }
prune::PruneMask read_mask(const std::filesystem::path& path) { return decode_mask(read_text(path)); }

std::string encode_tables(const std::vector<prune::DependencyTable>& tables) {
    std::ostringstream out;
    out << "pair\tconsumer_group\tproducer_group\trho\tfr_count\tsubset_size\n";
    for (const auto& t : tables) {
        for (std::size_t i = 0; i < t.consumer_groups; ++i) {
            for (std::size_t j = 0; j < t.producer_groups; ++j) {
                const auto& s = t.at(i, j);
                out << t.pair_index << '\t' << i << '\t' << j << '\t' << shortest(s.value) << '\t' << s.raw_fr_count << '\t'
                    << s.subset_size << '\n';
            }
        }
    }
    return out.str();
}

std::vector<prune::DependencyTable> decode_tables(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("pair\t", 0) != 0) throw FormatError("dependency table: missing header");
    struct Row {
        std::size_t pair, i, j;
        gmi::DependencyScore score;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r{};
        if (!(ls >> r.pair >> r.i >> r.j >> r.score.value >> r.score.raw_fr_count >> r.score.subset_size)) {
            throw FormatError("dependency table: malformed row '" + line + "'");
        }
        rows.push_back(r);
    }
    std::vector<prune::DependencyTable> tables;
    for (const auto& r : rows) {
        if (tables.empty() || tables.back().pair_index != r.pair) {
            tables.push_back({});
            tables.back().pair_index = r.pair;
        }
        auto& t = tables.back();
        t.consumer_groups = std::max(t.consumer_groups, r.i + 1);
        t.producer_groups = std::max(t.producer_groups, r.j + 1);
        t.scores.push_back(r.score);
    }
    // rows must be the dense row-major grid written by encode_tables
    std::size_t at = 0;
    for (auto& t : tables) {
        if (t.scores.size() != t.consumer_groups * t.producer_groups) throw FormatError("dependency table: incomplete grid");
        for (std::size_t i = 0; i < t.consumer_groups; ++i)
            for (std::size_t j = 0; j < t.producer_groups; ++j, ++at)
                if (rows[at].i != i || rows[at].j != j) throw FormatError("dependency table: rows out of order");
    }
    return tables;
}

nn::Dataset decode_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels) {
    ByteReader ri(images.data(), images.size(), "IDX images");
    ByteReader rl(labels.data(), labels.size(), "IDX labels");
    if (images.size() < 16 || ri.u32_be() != 0x00000803) throw FormatError("IDX images: bad magic");
    if (labels.size() < 8 || rl.u32_be() != 0x00000801) throw FormatError("IDX labels: bad magic");
    const auto count = ri.u32_be();
    const auto h = ri.u32_be();
    const auto w = ri.u32_be();
    const auto label_count = rl.u32_be();
    if (count != label_count) {
        throw FormatError("IDX: " + std::to_string(count) + " images but " + std::to_string(label_count) + " labels");
    }
    if (count == 0 || h == 0 || w == 0) throw FormatError("IDX: empty dataset");
    const std::uint64_t pixels = static_cast<std::uint64_t>(count) * h * w;
    if (ri.remaining() != pixels || rl.remaining() != count) throw FormatError("IDX: payload size does not match the header");

    nn::Dataset d;
    d.rows = count;
    d.dims = static_cast<std::size_t>(h) * w;
    d.features.resize(pixels);
    const auto px = ri.raw(pixels);
    for (std::size_t i = 0; i < pixels; ++i) d.features[i] = static_cast<float>(static_cast<unsigned char>(px[i])) / 255.0f;
    std::uint32_t max_label = 0;
    d.labels.resize(count);
    for (auto& l : d.labels) {
        l = rl.u8();
        max_label = std::max(max_label, l);
    }
    d.classes = static_cast<std::size_t>(max_label) + 1;
    return d;
}

nn::Dataset read_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
    return decode_idx(read_bytes(images), read_bytes(labels));
}

nn::Dataset load_mnist(const std::filesystem::path& dir, const std::string& split) {
    std::string prefix;
    if (split == "train") prefix = "train";
    else if (split == "test") prefix = "t10k";
    else throw ConfigError("unknown MNIST split '" + split + "'");
    const auto images = dir / (prefix + "-images-idx3-ubyte");
    const auto labels = dir / (prefix + "-labels-idx1-ubyte");
    if (!std::filesystem::exists(images) || !std::filesystem::exists(labels)) {
        throw IoError("MNIST " + split + " files not found in " + dir.string());
    }
    return read_mnist_idx(images, labels);
}

}  // namespace mint::io
