#include "mint/gmi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "mint/error.hpp"
#include "mint/gmi/mst.hpp"
#include "mint/random.hpp"

namespace mint::gmi {

namespace {

// Child-seed slots under an estimator call's seed.
constexpr std::uint64_t kSplitSlot = 0;
constexpr std::uint64_t kSurrogateSlot = 1;

double squared_block_distance(std::span<const double> p, std::span<const double> q,
                              const std::vector<std::size_t>& cols) {
    double s = 0.0;
    for (std::size_t c : cols) {
        const double d = p[c] - q[c];
        s += d * d;
    }
    return s;
}

std::vector<std::size_t> concat(std::initializer_list<const std::vector<std::size_t>*> blocks) {
    std::vector<std::size_t> out;
    for (const auto* b : blocks) out.insert(out.end(), b->begin(), b->end());
    return out;
}

DependencyScore run_estimator(const SampleMatrix& samples, const BlockSpec& spec,
                              std::uint64_t seed, bool conditional) {
    spec.validate(samples.cols());
    if (samples.rows() < 4) {
        throw InsufficientSamples("estimator: need at least 4 samples, got " +
                                  std::to_string(samples.rows()));
    }
    samples.require_finite();

    // Seeded split; for odd m the last shuffled row is the one dropped.
    std::vector<std::size_t> order(samples.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng(derive_seed(seed, {kSplitSlot}));
    std::shuffle(order.begin(), order.end(), split_rng);
    const std::size_t n = samples.rows() / 2;
    std::span<const std::size_t> first(order.data(), n);
    std::span<const std::size_t> second(order.data() + n, n);

    const SampleMatrix s1 = samples.select_rows(first);
    const SampleMatrix s2 = samples.select_rows(second);
    const std::uint64_t surrogate_seed = derive_seed(seed, {kSurrogateSlot});
    const SampleMatrix s2_bar = conditional ? nn_bootstrap(s2, spec, surrogate_seed)
                                            : permute_product(s2, spec, surrogate_seed);

    const auto cols = conditional ? concat({&spec.x, &spec.y, &spec.z}) : concat({&spec.x, &spec.y});
    const SampleMatrix merged =
        standardize(SampleMatrix::stack(s1.select_cols(cols), s2_bar.select_cols(cols)));

    std::vector<Origin> origins(2 * n, Origin::surrogate);
    std::fill(origins.begin(), origins.begin() + static_cast<std::ptrdiff_t>(n), Origin::joint);

    const std::size_t r = fr_statistic(euclidean_mst(merged), origins);
    const double raw = 1.0 - static_cast<double>(r) / static_cast<double>(n);
    return {std::clamp(raw, 0.0, 1.0), r, n};
}

}  // namespace

SampleMatrix standardize(const SampleMatrix& samples) {
    const std::size_t m = samples.rows();
    if (m < 2) throw InsufficientSamples("standardize: need at least 2 samples");
    SampleMatrix out(m, samples.cols());
    for (std::size_t c = 0; c < samples.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m; ++r) mean += samples(r, c);
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double d = samples(r, c) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(m));
        for (std::size_t r = 0; r < m; ++r) {
            out(r, c) = sd > 0.0 ? (samples(r, c) - mean) / sd : 0.0;
        }
    }
    return out;
}

SampleMatrix nn_bootstrap(const SampleMatrix& s2, const BlockSpec& spec, std::uint64_t /*seed*/) {
    spec.validate(s2.cols());
    if (spec.z.empty()) {
        throw ContractViolation("nn_bootstrap: Z block is empty; use the unconditional estimator");
    }
    const std::size_t m = s2.rows();
    if (m < 2) throw InsufficientSamples("nn_bootstrap: need at least 2 rows");

    SampleMatrix out = s2;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t nearest = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = squared_block_distance(s2.row(i), s2.row(j), spec.z);
            if (d < best) {
                best = d;
                nearest = j;
            }
        }
        for (std::size_t c : spec.y) out(i, c) = s2(nearest, c);
    }
    return out;
}

SampleMatrix permute_product(const SampleMatrix& s2, const BlockSpec& spec, std::uint64_t seed) {
    spec.validate(s2.cols());
    const std::size_t m = s2.rows();
    if (m < 2) throw InsufficientSamples("permute_product: need at least 2 rows");

    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    SampleMatrix out = s2;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c : spec.y) out(i, c) = s2(perm[i], c);
    }
    return out;
}

DependencyScore gmi(const SampleMatrix& samples, const BlockSpec& spec, std::uint64_t seed) {
    if (!spec.z.empty()) throw ContractViolation("gmi: Z block must be empty");
    return run_estimator(samples, spec, seed, false);
}

DependencyScore conditional_gmi(const SampleMatrix& samples, const BlockSpec& spec,
                                std::uint64_t seed) {
    if (spec.z.empty()) throw ContractViolation("conditional_gmi: Z block must be nonempty");
    return run_estimator(samples, spec, seed, true);
}

DependencyScore estimate(const SampleMatrix& samples, const BlockSpec& spec, std::uint64_t seed) {
    return spec.z.empty() ? gmi(samples, spec, seed) : conditional_gmi(samples, spec, seed);
}

double gaussian_gmi_oracle(double r, std::size_t grid) {
    if (!(std::abs(r) < 1.0)) throw DomainError("gaussian_gmi_oracle: need |r| < 1");
    if (grid < 64) throw DomainError("gaussian_gmi_oracle: grid must be at least 64");

    constexpr double lo = -6.0;
    constexpr double hi = 6.0;
    const double h = (hi - lo) / static_cast<double>(grid);
    const double one_minus_r2 = 1.0 - r * r;
    const double joint_norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(one_minus_r2));
    const double marginal_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

    std::vector<double> phi(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * h;
        phi[i] = marginal_norm * std::exp(-0.5 * x * x);
    }

    double integral = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * h;
        double row_sum = 0.0;
        for (std::size_t j = 0; j < grid; ++j) {
            const double y = lo + (static_cast<double>(j) + 0.5) * h;
            const double q = (x * x - 2.0 * r * x * y + y * y) / one_minus_r2;
            const double f = joint_norm * std::exp(-0.5 * q);
            const double g = phi[i] * phi[j];
            const double denom = f + g;
            if (denom > 0.0) row_sum += f * g / denom;
        }
        integral += row_sum;
    }
    return 1.0 - 2.0 * integral * h * h;
}

}  // namespace mint::gmi
