#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mint/nn/model.hpp"

namespace mint::nn {

/// Compressed sparse row copy of a weight matrix.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> values;
    std::vector<std::uint32_t> col_index;
    std::vector<std::uint32_t> row_offset;  // rows + 1 entries

    static CsrMatrix from_dense(std::span<const float> dense, std::size_t rows, std::size_t cols);
    std::vector<float> to_dense() const;
    std::size_t nnz() const { return values.size(); }
    /// 4 bytes per value and per column index, 4 per row offset, 16-byte header.
    std::size_t bytes() const { return 8 * nnz() + 4 * (rows + 1) + 16; }
};

struct LayerFootprint {
    std::string name;
    std::size_t dense_bytes = 0;   // 4 * (weights + biases)
    std::size_t sparse_bytes = 0;  // CSR weights + dense biases
};

struct Footprint {
    std::vector<LayerFootprint> layers;
    std::size_t dense_bytes = 0;
    std::size_t sparse_bytes = 0;
    double ratio() const { return dense_bytes ? static_cast<double>(sparse_bytes) / static_cast<double>(dense_bytes) : 0.0; }
};

Footprint csr_footprint(const MlpModel& model);

}  // namespace mint::nn
