#include "mint/gmi/sample_matrix.hpp"

#include <cmath>
#include <string>

#include "mint/error.hpp"

namespace mint::gmi {

SampleMatrix::SampleMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

SampleMatrix::SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("sample matrix: expected " + std::to_string(rows * cols) +
                         " values, got " + std::to_string(data_.size()));
    }
}

SampleMatrix SampleMatrix::select_rows(std::span<const std::size_t> indices) const {
    SampleMatrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

SampleMatrix SampleMatrix::select_cols(std::span<const std::size_t> indices) const {
    SampleMatrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
    }
    return out;
}

SampleMatrix SampleMatrix::stack(const SampleMatrix& top, const SampleMatrix& bottom) {
    if (top.cols() != bottom.cols()) throw ShapeError("stack: column counts differ");
    std::vector<double> data;
    data.reserve(top.data_.size() + bottom.data_.size());
    data.insert(data.end(), top.data_.begin(), top.data_.end());
    data.insert(data.end(), bottom.data_.begin(), bottom.data_.end());
    return SampleMatrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

void SampleMatrix::require_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) throw DomainError("sample matrix contains a non-finite value");
    }
}

BlockSpec BlockSpec::from_ranges(ColumnRange x, ColumnRange y, ColumnRange z) {
    BlockSpec spec;
    for (auto c = x.begin; c < x.end; ++c) spec.x.push_back(c);
    for (auto c = y.begin; c < y.end; ++c) spec.y.push_back(c);
    for (auto c = z.begin; c < z.end; ++c) spec.z.push_back(c);
    return spec;
}

void BlockSpec::validate(std::size_t cols) const {
    if (x.empty() || y.empty()) throw ContractViolation("block spec: X and Y blocks must be nonempty");
    std::vector<int> seen(cols, 0);
    for (const auto* block : {&x, &y, &z}) {
        for (std::size_t c : *block) {
            if (c >= cols) throw ContractViolation("block spec: column out of range");
            if (seen[c]++) throw ContractViolation("block spec: blocks overlap");
        }
    }
    for (int s : seen) {
        if (!s) throw ContractViolation("block spec: blocks do not cover every column");
    }
}

}  // namespace mint::gmi
