#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rgbxy {

/// Compressed sparse rows with single-precision values. Rows are convex
/// weight vectors in every use here.
struct SparseRows {
  std::size_t cols = 0;
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<float> values;

  std::size_t rows() const { return offsets.size() - 1; }
  std::size_t nnz() const { return values.size(); }
  std::size_t row_nnz(std::size_t r) const { return offsets[r + 1] - offsets[r]; }

  std::span<const std::uint32_t> row_indices(std::size_t r) const {
    return {indices.data() + offsets[r], row_nnz(r)};
  }
  std::span<const float> row_values(std::size_t r) const {
    return {values.data() + offsets[r], row_nnz(r)};
  }

  friend bool operator==(const SparseRows&, const SparseRows&) = default;
};

/// Dense row-major pixels x palette weights.
struct LayerWeights {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const float> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

  /// Per-column sums divided by the row count.
  std::vector<double> column_means() const;

  friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

}  // namespace rgbxy
