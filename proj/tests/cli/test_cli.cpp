#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "neurovote/serialization.hpp"
#include "support/fixtures.hpp"
#include "support/synth_fixture.hpp"
#include "support/temp_dir.hpp"

using namespace neurovote;
using namespace neurovote::testing;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + NEUROVOTE_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("validate reports a truncated payload") {
  TempDir dir;
  const auto dirs = write_synth_layers(dir / "data", {0}, small_synth_config());
  CHECK(cli(dir, "validate " + q(dirs[0])).code == 0);

  std::filesystem::resize_file(dirs[0] / "activations.bin", 100);
  const Run r = cli(dir, "validate " + q(dirs[0]));
  CHECK(r.code == 1);
  const Json err = Json::parse(r.err);
  CHECK(err["error"] == "SizeMismatch");
  CHECK(err.contains("message"));
}

TEST_CASE("rank puts a planted neuron first") {
  TempDir dir;
  const SynthConfig cfg = small_synth_config();
  const auto dirs = write_synth_layers(dir / "data", {0}, cfg);
  const Run r = cli(dir, "rank --dataset " + q(dirs[0]) + " --concept CONCEPT --method probeless");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["method"] == "probeless");
  CHECK(j["ordered"].size() == cfg.neurons);
  CHECK(j["ordered"][0][0].get<std::size_t>() < cfg.planted);
}

TEST_CASE("compare is repeatable, flags override the config file") {
  TempDir dir;
  const auto dirs = write_synth_layers(dir / "data", {0, 1}, small_synth_config());
  Json config{{"datasets", {dirs[0].string(), dirs[1].string()}},
              {"concepts", {"CONCEPT"}},
              {"s_values", {5, 10}},
              {"seed", 1},
              {"output", (dir / "a").string()}};
  {
    std::ofstream(dir / "config.json") << config.dump(2);
  }
  const std::string base = "compare --config " + q(dir / "config.json") + " --seed 2";
  const Run a = cli(dir, base + " --workers 1");
  REQUIRE(a.code == 0);
  const Run b = cli(dir, base + " --workers 3 --output " + q(dir / "b"));
  REQUIRE(b.code == 0);

  const auto files = list_files(dir / "a");
  CHECK(files == list_files(dir / "b"));
  CHECK(files.size() == 12);
  for (const auto& f : files) {
    if (f == "manifest.json") continue;  // records its own output directory
    CHECK_MESSAGE(read_file(dir / "a" / f) == read_file(dir / "b" / f), f);
  }
  const Json manifest = Json::parse(read_file(dir / "a" / "manifest.json"));
  CHECK(manifest["root_seed"] == 2);
  CHECK(manifest["config"]["s_values"] == Json::array({5, 10}));

  const Run again = cli(dir, base + " --workers 2");
  REQUIRE(again.code == 0);
  for (const auto& f : files) {
    if (f == "manifest.json") continue;
    CHECK_MESSAGE(read_file(dir / "a" / f) == read_file(dir / "b" / f), f);
  }
}

TEST_CASE("partial failure and usage errors") {
  TempDir dir;
  const auto dirs = write_synth_layers(dir / "data", {0}, small_synth_config());
  const Run single = cli(dir, "compare --dataset " + q(dirs[0]) + " --concept CONCEPT --method probeless --output " +
                                  q(dir / "out"));
  CHECK(single.code == 2);
  CHECK(Json::parse(single.err)["error"] == "PartialFailure");

  const Run bad = cli(dir, "rank --no-such-flag");
  CHECK(bad.code == 1);
  CHECK(Json::parse(bad.err)["error"] == "InvalidArguments");

  const Run unknown = cli(dir, "rank --dataset " + q(dirs[0]) + " --concept CONCEPT --method kmeans");
  CHECK(unknown.code == 1);
  CHECK(Json::parse(unknown.err)["error"] == "InvalidConfig");
}

TEST_CASE("synth and eval-acc") {
  TempDir dir;
  const Run s = cli(dir, "synth --out " + q(dir / "syn") + " --neurons 20 --tokens 1500 --planted 4 --seed 3");
  REQUIRE(s.code == 0);
  CHECK(Json::parse(s.out)["planted"] == Json::array({0, 1, 2, 3}));
  const Run acc = cli(dir, "eval-acc --dataset " + q(dir / "syn") + " --concept CONCEPT --method probeless random --s 4 20");
  REQUIRE(acc.code == 0);
  CHECK(acc.out.rfind("method,4,20\nprobeless,", 0) == 0);
}
