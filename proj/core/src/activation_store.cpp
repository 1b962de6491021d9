#include "neurovote/activation_store.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "neurovote/error.hpp"

namespace neurovote {

namespace fs = std::filesystem;

ActivationMatrix::ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                                   int layer, std::string model)
    : rows_(rows), cols_(cols), data_(std::move(data)), layer_(layer), model_(std::move(model)) {
  if (rows_ == 0 || cols_ == 0) {
    throw Error(ErrorCode::InvalidFormat, "activation matrix must have rows > 0 and neurons > 0");
  }
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::SizeMismatch,
                "activation data has " + std::to_string(data_.size()) + " values, expected " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

std::optional<std::size_t> ActivationMatrix::first_non_finite() const noexcept {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) return i;
  }
  return std::nullopt;
}

namespace {

std::uint32_t to_little_endian(std::uint32_t v) noexcept {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::MissingFile, "missing file: " + path.string());
  }
}

std::int64_t parse_int(std::string_view field, std::size_t line_no, const char* what) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::InvalidFormat, std::string("tokens.tsv line ") +
                                              std::to_string(line_no) + ": bad " + what + " '" +
                                              std::string(field) + "'");
  }
  return value;
}

TokenTable read_tokens(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  TokenTable table;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  std::size_t begin = 0;
  std::size_t line_no = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + begin, end - begin);
    ++line_no;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::InvalidFormat,
                  "tokens.tsv line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
    }
    TokenRecord rec{parse_int(fields[0], line_no, "sentence_id"),
                    parse_int(fields[1], line_no, "position"), std::string(fields[2]),
                    std::string(fields[3])};
    if (!seen.emplace(rec.sentence_id, rec.position).second) {
      throw Error(ErrorCode::InvalidFormat, "tokens.tsv line " + std::to_string(line_no) +
                                                ": duplicate (sentence_id, position)");
    }
    table.push_back(std::move(rec));
    begin = end + 1;
  }
  return table;
}

}  // namespace

DatasetMeta read_meta(const fs::path& dir) {
  const fs::path path = dir / kMetaFile;
  require_file(path);
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidFormat, "meta.json: " + std::string(e.what()));
  }
  DatasetMeta meta;
  try {
    const auto rows = j.at("rows").get<std::int64_t>();
    const auto neurons = j.at("neurons").get<std::int64_t>();
    if (rows <= 0 || neurons <= 0) {
      throw Error(ErrorCode::InvalidFormat, "meta.json: rows and neurons must be positive");
    }
    meta.rows = static_cast<std::size_t>(rows);
    meta.neurons = static_cast<std::size_t>(neurons);
    meta.layer = j.at("layer").get<int>();
    meta.model = j.at("model").get<std::string>();
    meta.dtype = j.at("dtype").get<std::string>();
    meta.version = j.at("version").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidFormat, "meta.json: " + std::string(e.what()));
  }
  if (meta.dtype != "f32le") {
    throw Error(ErrorCode::InvalidFormat, "meta.json: unsupported dtype '" + meta.dtype + "'");
  }
  if (meta.version != 1) {
    throw Error(ErrorCode::InvalidFormat,
                "meta.json: unsupported version " + std::to_string(meta.version));
  }
  return meta;
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path bin_path = dir / kActivationsFile;
  const fs::path tsv_path = dir / kTokensFile;
  require_file(dir / kMetaFile);
  require_file(bin_path);
  require_file(tsv_path);

  const DatasetMeta meta = read_meta(dir);
  const std::uintmax_t expected_bytes = meta.rows * meta.neurons * sizeof(float);
  const std::uintmax_t actual_bytes = fs::file_size(bin_path);
  if (actual_bytes != expected_bytes) {
    throw Error(ErrorCode::SizeMismatch, "activations.bin has " + std::to_string(actual_bytes) +
                                             " bytes, expected " + std::to_string(expected_bytes) +
                                             " (rows*neurons*4)");
  }

  std::vector<float> values(meta.rows * meta.neurons);
  {
    std::ifstream in(bin_path, std::ios::binary);
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(expected_bytes))) {
      throw Error(ErrorCode::IoFailure, "short read on " + bin_path.string());
    }
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : values) v = std::bit_cast<float>(to_little_endian(std::bit_cast<std::uint32_t>(v)));
  }

  TokenTable tokens = read_tokens(tsv_path);
  if (tokens.size() != meta.rows) {
    throw Error(ErrorCode::RowCountMismatch, "tokens.tsv has " + std::to_string(tokens.size()) +
                                                 " lines, meta.json declares " +
                                                 std::to_string(meta.rows) + " rows");
  }

  ActivationMatrix matrix(meta.rows, meta.neurons, std::move(values), meta.layer, meta.model);
  if (const auto bad = matrix.first_non_finite()) {
    throw Error(ErrorCode::NonFiniteValue,
                "non-finite activation at index " + std::to_string(*bad) + " (row " +
                    std::to_string(*bad / meta.neurons) + ", neuron " +
                    std::to_string(*bad % meta.neurons) + ")");
  }
  return Dataset{std::move(matrix), std::move(tokens)};
}

void save_dataset(const ActivationMatrix& matrix, const TokenTable& tokens, const fs::path& dir) {
  if (tokens.size() != matrix.rows()) {
    throw Error(ErrorCode::AlignmentError, "token table has " + std::to_string(tokens.size()) +
                                               " records but matrix has " +
                                               std::to_string(matrix.rows()) + " rows");
  }
  for (const auto& rec : tokens) {
    for (const std::string* field : {&rec.token, &rec.label}) {
      if (field->find_first_of("\t\n\r") != std::string::npos) {
        throw Error(ErrorCode::InvalidFormat, "token/label contains a tab or newline: '" + *field + "'");
      }
    }
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json meta;
  meta["rows"] = matrix.rows();
  meta["neurons"] = matrix.cols();
  meta["layer"] = matrix.layer();
  meta["model"] = matrix.model();
  meta["dtype"] = "f32le";
  meta["version"] = 1;
  {
    std::ofstream out(dir / kMetaFile, std::ios::binary);
    out << meta.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing meta.json");
  }
  {
    std::ofstream out(dir / kActivationsFile, std::ios::binary);
    std::vector<std::uint32_t> words;
    words.reserve(matrix.data().size());
    for (float v : matrix.data()) words.push_back(to_little_endian(std::bit_cast<std::uint32_t>(v)));
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing activations.bin");
  }
  {
    std::ofstream out(dir / kTokensFile, std::ios::binary);
    for (const auto& rec : tokens) {
      out << rec.sentence_id << '\t' << rec.position << '\t' << rec.token << '\t' << rec.label
          << '\n';
    }
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing tokens.tsv");
  }
}

}  // namespace neurovote
