#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neurovote {

/// Per-token activations of one layer: rows are token occurrences, columns
/// are neurons. Stored as float32 row-major, exactly as on disk.
class ActivationMatrix {
 public:
  ActivationMatrix() = default;

  /// Throws Error{InvalidFormat} when rows or cols is zero and
  /// Error{SizeMismatch} when data.size() != rows * cols.
  ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                   int layer = 0, std::string model = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int layer() const noexcept { return layer_; }
  const std::string& model() const noexcept { return model_; }

  float at(std::size_t row, std::size_t col) const noexcept {
    return data_[row * cols_ + col];
  }
  std::span<const float> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const float> data() const noexcept { return data_; }

  /// Flat index of the first NaN/Inf cell, if any.
  std::optional<std::size_t> first_non_finite() const noexcept;

  friend bool operator==(const ActivationMatrix&, const ActivationMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
  int layer_ = 0;
  std::string model_;
};

struct TokenRecord {
  std::int64_t sentence_id = 0;
  std::int64_t position = 0;
  std::string token;
  std::string label;

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

using TokenTable = std::vector<TokenRecord>;

struct DatasetMeta {
  std::size_t rows = 0;
  std::size_t neurons = 0;
  int layer = 0;
  std::string model;
  std::string dtype = "f32le";
  int version = 1;
};

struct Dataset {
  ActivationMatrix matrix;
  TokenTable tokens;
};

inline constexpr const char* kMetaFile = "meta.json";
inline constexpr const char* kActivationsFile = "activations.bin";
inline constexpr const char* kTokensFile = "tokens.tsv";

/// Reads meta.json, activations.bin and tokens.tsv from `dir` and
/// cross-validates them. Errors: MissingFile, InvalidFormat, SizeMismatch,
/// RowCountMismatch, NonFiniteValue.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes the three dataset files into `dir`, creating it if needed.
/// Errors: AlignmentError, InvalidFormat (tab/newline inside a token field),
/// IoFailure.
void save_dataset(const ActivationMatrix& matrix, const TokenTable& tokens,
                  const std::filesystem::path& dir);

DatasetMeta read_meta(const std::filesystem::path& dir);

}  // namespace neurovote
