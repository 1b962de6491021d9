#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "neurovote/activation_store.hpp"

namespace neurovote {

/// Dense float64 row-major feature block used for all arithmetic after load.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) noexcept { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const noexcept { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) noexcept { return {values.data() + r * cols, cols}; }
};

/// Copies the given rows (and columns; empty = all) into a float64 block.
FeatureMatrix gather(const ActivationMatrix& matrix, std::span<const std::size_t> rows,
                     std::span<const std::size_t> columns = {});

}  // namespace neurovote
