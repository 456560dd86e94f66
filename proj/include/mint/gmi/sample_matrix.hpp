#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mint::gmi {

/// Dense m x d table of real samples, row-major. Rows are observations.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t rows, std::size_t cols);
    SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    /// Rows in the given order (indices may repeat).
    SampleMatrix select_rows(std::span<const std::size_t> indices) const;
    /// Columns in the given order.
    SampleMatrix select_cols(std::span<const std::size_t> indices) const;
    /// Vertical concatenation; column counts must agree.
    static SampleMatrix stack(const SampleMatrix& top, const SampleMatrix& bottom);

    /// Throws DomainError on NaN/Inf entries.
    void require_finite() const;

    bool operator==(const SampleMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Half-open column range [begin, end).
struct ColumnRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return end == begin; }
    bool contains(std::size_t c) const { return c >= begin && c < end; }
    bool operator==(const ColumnRange&) const = default;
};

/// Partition of a SampleMatrix's columns into X, Y and (optionally) Z blocks.
/// Blocks are given as explicit column lists so non-contiguous Z sets (the
/// complement of a filter group) need no copying.
struct BlockSpec {
    std::vector<std::size_t> x;
    std::vector<std::size_t> y;
    std::vector<std::size_t> z;

    static BlockSpec from_ranges(ColumnRange x, ColumnRange y, ColumnRange z = {});

    /// Checks disjointness and full coverage of [0, cols).
    void validate(std::size_t cols) const;
};

}  // namespace mint::gmi
