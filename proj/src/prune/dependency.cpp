#include "mint/prune/dependency.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "mint/error.hpp"
#include "mint/random.hpp"

namespace mint::prune {

std::uint64_t cell_seed(std::uint64_t master_seed, std::size_t pair_index, std::size_t consumer_group,
                        std::size_t producer_group) {
    return derive_seed(master_seed, {pair_index, consumer_group, producer_group});
}

namespace {

// Producer columns followed by the consumer group's columns.
gmi::SampleMatrix join_columns(const gmi::SampleMatrix& producer, const gmi::SampleMatrix& consumer,
                               const gmi::ColumnRange& consumer_cols) {
    const std::size_t np = producer.cols();
    gmi::SampleMatrix out(producer.rows(), np + consumer_cols.size());
    for (std::size_t r = 0; r < producer.rows(); ++r) {
        auto dst = out.row(r);
        auto p = producer.row(r);
        std::copy(p.begin(), p.end(), dst.begin());
        for (std::size_t c = consumer_cols.begin; c < consumer_cols.end; ++c) {
            dst[np + c - consumer_cols.begin] = consumer(r, c);
        }
    }
    return out;
}

gmi::BlockSpec cell_blocks(const Grouping& producer, std::size_t j, std::size_t consumer_width) {
    gmi::BlockSpec spec;
    const auto& x = producer.range(j);
    for (std::size_t c = 0; c < producer.filter_count(); ++c) {
        (x.contains(c) ? spec.x : spec.z).push_back(c);
    }
    for (std::size_t c = 0; c < consumer_width; ++c) spec.y.push_back(producer.filter_count() + c);
    return spec;
}

}  // namespace

DependencyTable compute_dependency_table(const gmi::SampleMatrix& producer_acts,
                                         const gmi::SampleMatrix& consumer_acts,
                                         const Grouping& producer, const Grouping& consumer,
                                         std::size_t pair_index, std::uint64_t master_seed,
                                         unsigned threads) {
    if (producer_acts.rows() != consumer_acts.rows()) {
        throw ShapeError("dependency table: producer and consumer row counts differ");
    }
    if (producer_acts.cols() != producer.filter_count() ||
        consumer_acts.cols() != consumer.filter_count()) {
        throw ShapeError("dependency table: activation widths do not match the groupings");
    }
    if (producer_acts.rows() < 4) {
        throw InsufficientSamples("dependency table: need at least 4 activation rows");
    }

    DependencyTable table;
    table.pair_index = pair_index;
    table.consumer_groups = consumer.group_count();
    table.producer_groups = producer.group_count();
    table.scores.resize(table.consumer_groups * table.producer_groups);

    std::vector<gmi::SampleMatrix> joined(table.consumer_groups);
    for (std::size_t i = 0; i < table.consumer_groups; ++i) {
        joined[i] = join_columns(producer_acts, consumer_acts, consumer.range(i));
    }

    auto score_cell = [&](std::size_t cell) {
        const std::size_t i = cell / table.producer_groups;
        const std::size_t j = cell % table.producer_groups;
        const auto spec = cell_blocks(producer, j, consumer.range(i).size());
        table.scores[cell] =
            gmi::estimate(joined[i], spec, cell_seed(master_seed, pair_index, i, j));
    };

    const std::size_t cells = table.scores.size();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells)));
    if (threads == 1) {
        for (std::size_t cell = 0; cell < cells; ++cell) score_cell(cell);
        return table;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t cell = next++; cell < cells; cell = next++) {
                    try {
                        score_cell(cell);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

}  // namespace mint::prune
