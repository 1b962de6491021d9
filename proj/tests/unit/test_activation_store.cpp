#include <cstring>
#include <fstream>

#include "doctest.h"
#include "neurovote/activation_store.hpp"
#include "neurovote/error.hpp"
#include "neurovote/rng.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace neurovote;
using neurovote::testing::TempDir;
using neurovote::testing::read_file;

namespace {

ErrorCode load_error(const std::filesystem::path& dir) {
  try {
    load_dataset(dir);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("load_dataset did not throw");
  return ErrorCode::IoFailure;
}

Dataset tiny() {
  return {ActivationMatrix(2, 3, {1.f, 2.f, 3.f, 4.f, 5.f, 6.f}, 6, "bert"),
          {{0, 0, "The", "DT"}, {0, 1, "cat", "NN"}}};
}

}  // namespace

TEST_CASE("minimal well-formed dataset loads") {
  TempDir dir;
  const Dataset d = tiny();
  save_dataset(d.matrix, d.tokens, dir.path());
  CHECK(std::filesystem::file_size(dir / kActivationsFile) == 24);

  const Dataset back = load_dataset(dir.path());
  CHECK(back.matrix.rows() == 2);
  CHECK(back.matrix.cols() == 3);
  CHECK(back.matrix.layer() == 6);
  CHECK(back.matrix.model() == "bert");
  CHECK(back.matrix.at(1, 2) == 6.f);
  CHECK(back.tokens == d.tokens);
}

TEST_CASE("single 0.5 value is four little-endian bytes") {
  TempDir dir;
  save_dataset(ActivationMatrix(1, 1, {0.5f}), {{0, 0, "x", "L"}}, dir.path());
  const std::string bytes = read_file(dir / kActivationsFile);
  REQUIRE(bytes.size() == 4);
  CHECK(bytes == std::string("\x00\x00\x00\x3f", 4));
}

TEST_CASE("meta.json and tokens.tsv layout") {
  TempDir dir;
  const Dataset d = tiny();
  save_dataset(d.matrix, d.tokens, dir.path());
  CHECK(read_file(dir / kTokensFile) == "0\t0\tThe\tDT\n0\t1\tcat\tNN\n");
  const DatasetMeta meta = read_meta(dir.path());
  CHECK(meta.rows == 2);
  CHECK(meta.neurons == 3);
  CHECK(meta.dtype == "f32le");
  CHECK(meta.version == 1);
}

TEST_CASE("truncated payload is a SizeMismatch") {
  TempDir dir;
  const Dataset d = tiny();
  save_dataset(d.matrix, d.tokens, dir.path());
  std::filesystem::resize_file(dir / kActivationsFile, 23);
  CHECK(load_error(dir.path()) == ErrorCode::SizeMismatch);
}

TEST_CASE("corruption classes map to named errors") {
  TempDir dir;
  const Dataset d = tiny();

  SUBCASE("missing file") {
    save_dataset(d.matrix, d.tokens, dir.path());
    std::filesystem::remove(dir / kTokensFile);
    CHECK(load_error(dir.path()) == ErrorCode::MissingFile);
  }
  SUBCASE("extra token line") {
    save_dataset(d.matrix, d.tokens, dir.path());
    std::ofstream(dir / kTokensFile, std::ios::app) << "1\t0\textra\tNN\n";
    CHECK(load_error(dir.path()) == ErrorCode::RowCountMismatch);
  }
  SUBCASE("non-finite value reports its index") {
    ActivationMatrix bad(2, 3, {0.f, 0.f, 0.f, 0.f, std::numeric_limits<float>::quiet_NaN(), 0.f});
    save_dataset(bad, d.tokens, dir.path());
    try {
      load_dataset(dir.path());
      FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteValue);
      CHECK(std::string(e.what()).find("index 4") != std::string::npos);
    }
  }
  SUBCASE("wrong dtype") {
    save_dataset(d.matrix, d.tokens, dir.path());
    std::ofstream(dir / kMetaFile) << R"({"rows":2,"neurons":3,"layer":0,"model":"m","dtype":"f16","version":1})";
    CHECK(load_error(dir.path()) == ErrorCode::InvalidFormat);
  }
  SUBCASE("duplicate sentence position") {
    save_dataset(d.matrix, {{0, 0, "a", "X"}, {0, 0, "b", "Y"}}, dir.path());
    CHECK(load_error(dir.path()) == ErrorCode::InvalidFormat);
  }
}

TEST_CASE("save rejects misaligned token tables") {
  TempDir dir;
  const Dataset d = tiny();
  try {
    save_dataset(d.matrix, {}, dir.path());
    FAIL("expected AlignmentError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AlignmentError);
  }
  CHECK_THROWS_AS(save_dataset(d.matrix, {{0, 0, "a\tb", "X"}, {0, 1, "c", "Y"}}, dir.path()), Error);
}

TEST_CASE("matrix constructor enforces shape") {
  CHECK_THROWS_AS(ActivationMatrix(0, 3, {}), Error);
  CHECK_THROWS_AS(ActivationMatrix(2, 2, {1.f, 2.f, 3.f}), Error);
}

TEST_CASE("round trip is bit-exact over randomized matrices") {
  // Includes subnormals, signed zeros and extreme magnitudes via raw bit patterns.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SplitMix64 rng(seed);
    const std::size_t rows = 100;
    const std::size_t cols = 16;
    std::vector<float> values(rows * cols);
    for (auto& v : values) {
      std::uint32_t bits = static_cast<std::uint32_t>(rng.next_u64());
      if (((bits >> 23) & 0xFF) == 0xFF) bits &= ~(1u << 30);  // keep finite
      std::memcpy(&v, &bits, sizeof v);
    }
    TokenTable tokens;
    for (std::size_t r = 0; r < rows; ++r) {
      tokens.push_back({static_cast<std::int64_t>(r / 7), static_cast<std::int64_t>(r % 7),
                        "tok" + std::to_string(r), r % 3 == 0 ? "NN" : "VB"});
    }
    const ActivationMatrix m(rows, cols, values, 3, "rand");

    TempDir first;
    TempDir second;
    save_dataset(m, tokens, first.path());
    const Dataset loaded = load_dataset(first.path());
    save_dataset(loaded.matrix, loaded.tokens, second.path());

    CHECK(std::memcmp(loaded.matrix.data().data(), values.data(), values.size() * sizeof(float)) == 0);
    CHECK(loaded.tokens == tokens);
    for (const char* f : {kMetaFile, kActivationsFile, kTokensFile}) {
      CHECK(read_file(first / f) == read_file(second / f));
    }
  }
}
