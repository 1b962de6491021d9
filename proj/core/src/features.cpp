#include "neurovote/features.hpp"

namespace neurovote {

FeatureMatrix gather(const ActivationMatrix& matrix, std::span<const std::size_t> rows,
                     std::span<const std::size_t> columns) {
  const std::size_t cols = columns.empty() ? matrix.cols() : columns.size();
  FeatureMatrix out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = matrix.row(rows[i]);
    auto dst = out.row(i);
    if (columns.empty()) {
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[c];
    } else {
      for (std::size_t c = 0; c < cols; ++c) dst[c] = src[columns[c]];
    }
  }
  return out;
}

}  // namespace neurovote
