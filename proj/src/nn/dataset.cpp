#include "mint/nn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mint/error.hpp"
#include "mint/random.hpp"

namespace mint::nn {

namespace {

// Affine map of every feature into [0, 1] using the global min and max, so
// synthetic sets share the pixel range the attacks assume.
void rescale_unit(std::vector<float>& features) {
    const auto [lo, hi] = std::minmax_element(features.begin(), features.end());
    const double a = *lo, span = *hi - *lo;
    for (auto& v : features) v = span > 0.0 ? static_cast<float>((v - a) / span) : 0.0f;
    for (auto& v : features) v = std::clamp(v, 0.0f, 1.0f);
}

}  // namespace

MatrixD Dataset::batch(std::span<const std::size_t> indices) const {
    MatrixD out(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(dims));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const float* src = features.data() + indices[i] * dims;
        for (std::size_t c = 0; c < dims; ++c) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = src[c];
        }
    }
    return out;
}

MatrixD Dataset::all() const {
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return batch(idx);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.rows = indices.size();
    out.dims = dims;
    out.classes = classes;
    out.features.reserve(indices.size() * dims);
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= rows) throw ShapeError("dataset subset index out of range");
        auto r = row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
    }
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(classes, 0);
    for (auto l : labels) ++counts.at(l);
    return counts;
}

void Dataset::validate() const {
    if (rows == 0) throw DomainError("dataset is empty");
    if (features.size() != rows * dims || labels.size() != rows) {
        throw ShapeError("dataset sizes are inconsistent");
    }
    for (auto l : labels)
        if (l >= classes) throw DomainError("label out of range");
}

Dataset make_blobs(std::size_t classes, std::size_t per_class, std::size_t dims, double radius,
                   double spread, std::uint64_t seed) {
    if (classes < 2 || per_class == 0 || dims < 2) throw DomainError("make_blobs: bad parameters");
    Dataset d;
    d.rows = classes * per_class;
    d.dims = dims;
    d.classes = classes;
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    for (std::size_t k = 0; k < classes; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(classes);
        for (std::size_t i = 0; i < per_class; ++i) {
            for (std::size_t c = 0; c < dims; ++c) {
                const double centre = c == 0 ? radius * std::cos(angle) : c == 1 ? radius * std::sin(angle) : 0.0;
                d.features.push_back(static_cast<float>(centre + noise(rng)));
            }
            d.labels.push_back(static_cast<std::uint32_t>(k));
        }
    }
    rescale_unit(d.features);
    return d;
}

Dataset make_rings(std::size_t classes, std::size_t per_class, double noise, std::uint64_t seed) {
    if (classes < 2 || per_class == 0) throw DomainError("make_rings: bad parameters");
    Dataset d;
    d.rows = classes * per_class;
    d.dims = 2;
    d.classes = classes;
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> jitter(0.0, noise);
    for (std::size_t k = 0; k < classes; ++k) {
        for (std::size_t i = 0; i < per_class; ++i) {
            const double a = angle(rng);
            const double r = static_cast<double>(k + 1) + jitter(rng);
            d.features.push_back(static_cast<float>(r * std::cos(a)));
            d.features.push_back(static_cast<float>(r * std::sin(a)));
            d.labels.push_back(static_cast<std::uint32_t>(k));
        }
    }
    rescale_unit(d.features);
    return d;
}

std::pair<Dataset, Dataset> split_per_class(const Dataset& data, std::size_t test_per_class,
                                            std::uint64_t seed) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t k = 0; k < data.classes; ++k) {
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < data.rows; ++r)
            if (data.labels[r] == k) members.push_back(r);
        if (members.size() <= test_per_class) throw SamplingError("split: class too small");
        Rng rng(derive_seed(seed, {k}));
        std::shuffle(members.begin(), members.end(), rng);
        test_idx.insert(test_idx.end(), members.begin(),
                        members.begin() + static_cast<std::ptrdiff_t>(test_per_class));
        train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(test_per_class),
                         members.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {data.subset(train_idx), data.subset(test_idx)};
}

}  // namespace mint::nn
