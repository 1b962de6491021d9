// neurovote command line: synth, rank, compare, eval-acc, validate.
//
// Exit codes: 0 success, 1 validation / usage error, 2 partial failure.
// Errors are written to stderr as one JSON object {"error", "message"}.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"
#include "neurovote/error.hpp"
#include "neurovote/evaluator.hpp"
#include "neurovote/experiment.hpp"
#include "neurovote/rng.hpp"
#include "neurovote/serialization.hpp"

namespace fs = std::filesystem;
using namespace neurovote;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

void report_error(std::string_view code, std::string_view message, const Json& extra = Json::object()) {
  Json j{{"error", code}, {"message", message}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::cerr << j.dump() << '\n';
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open config " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  const fs::path p(*path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + p.string());
}

template <typename T>
void apply_flag(T& target, const std::optional<T>& value) {
  if (value) target = *value;
}

template <typename T>
void apply_flag(std::vector<T>& target, const std::vector<T>& values) {
  if (!values.empty()) target = values;
}

// Experiment settings shared by rank, eval-acc and compare.
struct ExperimentFlags {
  std::optional<std::string> config;
  std::vector<std::string> datasets;
  std::vector<std::string> concepts;
  std::vector<std::string> methods;
  std::vector<std::size_t> s_values;
  std::optional<std::uint64_t> seed;
  std::optional<double> iou_percentile;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> learning_rate;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> gaussian_max_selected;
  std::optional<std::string> borda_order;
  std::optional<std::string> output;

  void add_common(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file; flags override its values");
    cmd->add_option("--seed", seed, "root seed");
    cmd->add_option("--iou-percentile", iou_percentile, "IoU activation percentile, in (0, 100)");
    cmd->add_option("--lambda1", lambda1, "L1 strength for lasso and lca");
    cmd->add_option("--lambda2", lambda2, "L2 strength for ridge and lca");
    cmd->add_option("--learning-rate", learning_rate);
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--batch-size", batch_size);
    cmd->add_option("--gaussian-max-selected", gaussian_max_selected, "0 ranks every neuron greedily");
  }

  ExperimentConfig resolve(bool has_s_default = true) const {
    ExperimentConfig c;
    if (!has_s_default) c.s_values.clear();
    if (config) c = experiment_config_from_json(read_json_file(*config), c);
    if (!datasets.empty()) c.datasets.assign(datasets.begin(), datasets.end());
    apply_flag(c.concepts, concepts);
    apply_flag(c.methods, methods);
    apply_flag(c.s_values, s_values);
    apply_flag(c.seed, seed);
    apply_flag(c.settings.iou_percentile, iou_percentile);
    apply_flag(c.settings.train.lambda1, lambda1);
    apply_flag(c.settings.train.lambda2, lambda2);
    apply_flag(c.settings.train.learning_rate, learning_rate);
    apply_flag(c.settings.train.epochs, epochs);
    apply_flag(c.settings.train.batch_size, batch_size);
    apply_flag(c.settings.gaussian_max_selected, gaussian_max_selected);
    if (borda_order) {
      c = experiment_config_from_json(Json{{"borda_order", *borda_order}}, c);
    }
    if (output) c.output = *output;
    return c;
  }
};

const fs::path& single_dataset(const ExperimentConfig& c) {
  if (c.datasets.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "exactly one dataset directory is required, got " +
                                              std::to_string(c.datasets.size()));
  }
  return c.datasets.front();
}

const std::string& single_concept(const ExperimentConfig& c) {
  if (c.concepts.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "exactly one concept is required, got " +
                                              std::to_string(c.concepts.size()));
  }
  return c.concepts.front();
}

// synth ----------------------------------------------------------------------

struct SynthFlags {
  std::optional<std::string> config;
  std::string out;
  std::optional<std::size_t> neurons, tokens, planted;
  std::optional<double> delta, concept_fraction, noise_std, correlation;
  std::optional<std::uint64_t> seed;
  bool correlated = false;
  std::optional<int> layer;
  std::optional<std::string> model;
};

int run_synth(const SynthFlags& f) {
  SynthConfig c;
  if (f.config) c = synth_config_from_json(read_json_file(*f.config), c);
  apply_flag(c.neurons, f.neurons);
  apply_flag(c.tokens, f.tokens);
  apply_flag(c.planted, f.planted);
  apply_flag(c.delta, f.delta);
  apply_flag(c.concept_fraction, f.concept_fraction);
  apply_flag(c.noise_std, f.noise_std);
  apply_flag(c.correlation, f.correlation);
  apply_flag(c.seed, f.seed);
  apply_flag(c.layer, f.layer);
  apply_flag(c.model, f.model);
  if (f.correlated) c.correlated = true;

  const SynthDataset d = synth_generate(c);
  save_dataset(d.matrix, d.tokens, f.out);
  Json j{{"output", fs::path(f.out).generic_string()},
         {"rows", d.matrix.rows()},
         {"neurons", d.matrix.cols()},
         {"planted", d.planted},
         {"config", to_json(c)}};
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

// rank -----------------------------------------------------------------------

int run_rank(const ExperimentFlags& f, std::optional<std::size_t> top) {
  const ExperimentConfig c = f.resolve();
  if (c.methods.size() != 1) {
    throw Error(ErrorCode::InvalidConfig, "rank takes exactly one --method");
  }
  const Dataset data = load_dataset(single_dataset(c));
  const std::string& concept_name = single_concept(c);
  const ConceptDataset ds = build_concept_dataset(data.tokens, concept_name, derive_seed(c.seed, concept_name));
  const NeuronRanking ranking = run_method(c.methods.front(), data.matrix, ds, c.settings);
  if (top && (*top == 0 || *top > ranking.size())) {
    throw Error(ErrorCode::SOutOfRange, "--top must lie in [1, " + std::to_string(ranking.size()) + "]");
  }
  write_output(f.output, to_json(ranking, top).dump(2) + "\n");
  return kExitOk;
}

// eval-acc -------------------------------------------------------------------

int run_eval_acc(const ExperimentFlags& f) {
  ExperimentConfig c = f.resolve(false);
  if (c.s_values.empty()) c.s_values = {30, 50, 70, 100};
  const Dataset data = load_dataset(single_dataset(c));
  const std::string& concept_name = single_concept(c);
  const ConceptDataset ds = build_concept_dataset(data.tokens, concept_name, derive_seed(c.seed, concept_name));
  std::vector<NeuronRanking> rankings;
  for (const auto& m : order_methods(c.methods)) rankings.push_back(run_method(m, data.matrix, ds, c.settings));
  const AccuracyTable table = accuracy_sweep(data.matrix, ds, rankings, c.s_values);
  std::ostringstream csv;
  write_accuracy_csv(csv, table);
  write_output(f.output, csv.str());
  return kExitOk;
}

// compare --------------------------------------------------------------------

int run_compare(const ExperimentFlags& f, std::size_t workers) {
  const ExperimentConfig c = f.resolve();
  const ExperimentSummary summary = run_experiment(c, RunOptions{workers});
  Json j{{"output", c.output.generic_string()},
         {"cells_succeeded", summary.cells_succeeded},
         {"cells_failed", summary.cells_failed},
         {"partial_failure", summary.partial_failure()}};
  std::cout << j.dump(2) << '\n';
  if (summary.partial_failure()) {
    report_error("PartialFailure",
                 std::to_string(summary.cells_failed) + " cell(s) failed; see manifest.json",
                 Json{{"manifest", (c.output / "manifest.json").generic_string()}});
    return kExitPartial;
  }
  return kExitOk;
}

// validate -------------------------------------------------------------------

int run_validate(const std::vector<std::string>& dirs) {
  int status = kExitOk;
  for (const auto& dir : dirs) {
    try {
      const Dataset d = load_dataset(dir);
      std::map<std::string, std::size_t> counts;
      for (const auto& t : d.tokens) ++counts[t.label];
      Json j{{"dataset", dir},
             {"status", "ok"},
             {"rows", d.matrix.rows()},
             {"neurons", d.matrix.cols()},
             {"layer", d.matrix.layer()},
             {"model", d.matrix.model()},
             {"labels", counts},
             {"eligible_concepts", frequent_concepts(d.tokens)}};
      std::cout << j.dump() << '\n';
    } catch (const Error& e) {
      report_error(to_string(e.code()), e.what(), Json{{"dataset", dir}});
      status = kExitInvalid;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neuron ranking and voting-compatibility toolkit", "neurovote"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "neurovote 0.1.0");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a planted-neuron synthetic dataset");
  synth_cmd->add_option("--config", synth.config, "JSON synthetic config; flags override it");
  synth_cmd->add_option("--out", synth.out, "output dataset directory")->required();
  synth_cmd->add_option("--neurons", synth.neurons);
  synth_cmd->add_option("--tokens", synth.tokens);
  synth_cmd->add_option("--planted", synth.planted);
  synth_cmd->add_option("--delta", synth.delta, "mean shift of planted neurons, in noise std units");
  synth_cmd->add_option("--concept-fraction", synth.concept_fraction);
  synth_cmd->add_option("--noise-std", synth.noise_std);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_flag("--correlated", synth.correlated, "planted neurons share a latent factor");
  synth_cmd->add_option("--correlation", synth.correlation);
  synth_cmd->add_option("--layer", synth.layer);
  synth_cmd->add_option("--model", synth.model);

  ExperimentFlags rank;
  std::optional<std::size_t> rank_top;
  auto* rank_cmd = app.add_subcommand("rank", "rank one layer's neurons for one concept");
  rank.add_common(rank_cmd);
  rank_cmd->add_option("--dataset", rank.datasets, "dataset directory")->expected(1);
  rank_cmd->add_option("--concept", rank.concepts, "concept label")->expected(1);
  rank_cmd->add_option("--method", rank.methods, "method id")->expected(1);
  rank_cmd->add_option("--top", rank_top, "write only the first s entries");
  rank_cmd->add_option("--output", rank.output, "output JSON file (default stdout)");

  ExperimentFlags acc;
  auto* acc_cmd = app.add_subcommand("eval-acc", "held-out accuracy of classifiers on top-s neurons");
  acc.add_common(acc_cmd);
  acc_cmd->add_option("--dataset", acc.datasets, "dataset directory")->expected(1);
  acc_cmd->add_option("--concept", acc.concepts, "concept label")->expected(1);
  acc_cmd->add_option("--method", acc.methods, "method ids (default: all)");
  acc_cmd->add_option("--s", acc.s_values, "neuron counts (default: 30 50 70 100)");
  acc_cmd->add_option("--output", acc.output, "output CSV file (default stdout)");

  ExperimentFlags cmp;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  auto* cmp_cmd = app.add_subcommand("compare", "run the full compatibility experiment");
  cmp.add_common(cmp_cmd);
  cmp_cmd->add_option("--dataset", cmp.datasets, "dataset directories, one per layer");
  cmp_cmd->add_option("--concept", cmp.concepts, "concept labels (default: every label with >= 200 tokens)");
  cmp_cmd->add_option("--method", cmp.methods, "method ids (default: all)");
  cmp_cmd->add_option("--s", cmp.s_values, "top-s values (default: 10 30 50)");
  cmp_cmd->add_option("--borda-order", cmp.borda_order, "descending (default) or ascending");
  cmp_cmd->add_option("--output", cmp.output, "output directory");
  cmp_cmd->add_option("--workers", workers, "worker threads; never changes the output");

  std::vector<std::string> validate_dirs;
  auto* val_cmd = app.add_subcommand("validate", "check dataset directories");
  val_cmd->add_option("datasets", validate_dirs, "dataset directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("InvalidArguments", e.what());
    return kExitInvalid;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*rank_cmd) return run_rank(rank, rank_top);
    if (*acc_cmd) return run_eval_acc(acc);
    if (*cmp_cmd) return run_compare(cmp, workers == 0 ? 1 : workers);
    return run_validate(validate_dirs);
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return kExitInvalid;
  }
}
