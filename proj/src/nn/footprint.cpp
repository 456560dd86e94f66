#include "mint/nn/footprint.hpp"

#include "mint/error.hpp"

namespace mint::nn {

CsrMatrix CsrMatrix::from_dense(std::span<const float> dense, std::size_t rows, std::size_t cols) {
    if (dense.size() != rows * cols) throw ShapeError("CSR conversion: size mismatch");
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_offset.reserve(rows + 1);
    m.row_offset.push_back(0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const float v = dense[r * cols + c];
            if (v != 0.0f) {
                m.values.push_back(v);
                m.col_index.push_back(static_cast<std::uint32_t>(c));
            }
        }
        m.row_offset.push_back(static_cast<std::uint32_t>(m.values.size()));
    }
    return m;
}

std::vector<float> CsrMatrix::to_dense() const {
    std::vector<float> out(rows * cols, 0.0f);
    for (std::size_t r = 0; r < rows; ++r)
        for (auto i = row_offset[r]; i < row_offset[r + 1]; ++i) out[r * cols + col_index[i]] = values[i];
    return out;
}

Footprint csr_footprint(const MlpModel& model) {
    Footprint fp;
    for (std::size_t k = 0; k < model.layer_count(); ++k) {
        const auto& l = model.layers()[k];
        const auto csr = CsrMatrix::from_dense(l.weights, l.out, l.in);
        LayerFootprint lf{MlpModel::layer_name(k), 4 * (l.weights.size() + l.bias.size()),
                          csr.bytes() + 4 * l.bias.size()};
        fp.dense_bytes += lf.dense_bytes;
        fp.sparse_bytes += lf.sparse_bytes;
        fp.layers.push_back(std::move(lf));
    }
    return fp;
}

}  // namespace mint::nn
