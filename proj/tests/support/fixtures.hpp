#pragma once

#include <cstddef>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"

namespace neurovote::testing {

/// Dataset over rows 0..n-1 with the given labels (1 = concept) and every
/// example in `split`. Bypasses the 200-example gate for small hand cases.
inline ConceptDataset manual_dataset(const std::vector<int>& labels, Split split = Split::Train) {
  ConceptDataset ds;
  ds.concept_name = "C";
  for (std::size_t r = 0; r < labels.size(); ++r) {
    (labels[r] == 1 ? ds.positive_rows : ds.negative_rows).push_back(r);
  }
  ds.split.assign(ds.size(), split);
  return ds;
}

/// Matrix from rows of doubles.
inline ActivationMatrix matrix_from(const std::vector<std::vector<double>>& rows, int layer = 0) {
  std::vector<float> data;
  for (const auto& r : rows) {
    for (double v : r) data.push_back(static_cast<float>(v));
  }
  return ActivationMatrix(rows.size(), rows.front().size(), std::move(data), layer, "test");
}

/// Column-major construction: columns[n][row].
inline ActivationMatrix matrix_from_columns(const std::vector<std::vector<double>>& columns) {
  const std::size_t rows = columns.front().size();
  std::vector<float> data(rows * columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < rows; ++r) data[r * columns.size() + c] = static_cast<float>(columns[c][r]);
  }
  return ActivationMatrix(rows, columns.size(), std::move(data), 0, "test");
}

inline TokenTable tokens_with_labels(const std::vector<std::string>& labels) {
  TokenTable t;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    t.push_back({static_cast<std::int64_t>(i / 10), static_cast<std::int64_t>(i % 10),
                 "t" + std::to_string(i), labels[i]});
  }
  return t;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace neurovote::testing
