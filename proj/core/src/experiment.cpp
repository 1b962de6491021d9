#include "neurovote/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "neurovote/error.hpp"
#include "neurovote/rankers.hpp"
#include "neurovote/rng.hpp"

namespace neurovote {

namespace fs = std::filesystem;

NeuronRanking run_method(std::string_view method, const ActivationMatrix& matrix,
                         const ConceptDataset& dataset, const MethodSettings& settings) {
  auto probe = [&](double lambda1, double lambda2) {
    TrainConfig config = settings.train;
    config.lambda1 = lambda1;
    config.lambda2 = lambda2;
    config.seed = derive_seed(dataset.seed, method);
    return rank_from_probe(train_probe(matrix, dataset, config), dataset.concept_name, matrix.layer());
  };

  if (method == methods::kProbeless) return probeless_rank(matrix, dataset);
  if (method == methods::kIou) return iou_rank(matrix, dataset, settings.iou_percentile);
  if (method == methods::kMeanSelect) return mean_select_rank(matrix, dataset);
  if (method == methods::kLasso) return probe(settings.train.lambda1, 0.0);
  if (method == methods::kRidge) return probe(0.0, settings.train.lambda2);
  if (method == methods::kLca) return probe(settings.train.lambda1, settings.train.lambda2);
  if (method == methods::kGaussian) {
    GaussianOptions options;
    options.max_selected = settings.gaussian_max_selected;
    return gaussian_greedy_rank(fit_gaussian(matrix, dataset, options), matrix, dataset, options);
  }
  if (method == methods::kRandom) {
    NeuronRanking r = random_rank(matrix.cols(), derive_seed(dataset.seed, method));
    r.concept_name = dataset.concept_name;
    r.layer = matrix.layer();
    return r;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + std::string(method) + "'");
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base) {
  try {
    ExperimentConfig c = std::move(base);
    if (j.contains("datasets")) {
      c.datasets.clear();
      for (const auto& d : j.at("datasets")) c.datasets.emplace_back(d.get<std::string>());
    }
    if (j.contains("concepts")) {
      const auto& concepts = j.at("concepts");
      if (concepts.is_string()) {
        if (concepts.get<std::string>() != "auto") {
          throw Error(ErrorCode::InvalidConfig, "concepts must be \"auto\" or a list");
        }
        c.concepts.clear();
      } else {
        c.concepts = concepts.get<std::vector<std::string>>();
      }
    }
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("s_values")) c.s_values = j.at("s_values").get<std::vector<std::size_t>>();
    c.settings.iou_percentile = j.value("iou_percentile", c.settings.iou_percentile);
    c.settings.gaussian_max_selected = j.value("gaussian_max_selected", c.settings.gaussian_max_selected);
    if (j.contains("train")) c.settings.train = train_config_from_json(j.at("train"), c.settings.train);
    if (j.contains("borda_order")) {
      const auto order = j.at("borda_order").get<std::string>();
      if (order == "descending") {
        c.borda_order = BordaOrder::Descending;
      } else if (order == "ascending") {
        c.borda_order = BordaOrder::Ascending;
      } else {
        throw Error(ErrorCode::InvalidConfig, "borda_order must be descending or ascending");
      }
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
}

Json to_json(const ExperimentConfig& config) {
  Json j;
  Json datasets = Json::array();
  for (const auto& d : config.datasets) datasets.push_back(d.generic_string());
  j["datasets"] = std::move(datasets);
  if (config.concepts.empty()) {
    j["concepts"] = "auto";
  } else {
    j["concepts"] = config.concepts;
  }
  j["methods"] = config.methods;
  j["s_values"] = config.s_values;
  j["iou_percentile"] = config.settings.iou_percentile;
  Json train = to_json(config.settings.train);
  train.erase("seed");  // probe seeds derive from the concept seed
  j["train"] = std::move(train);
  j["gaussian_max_selected"] = config.settings.gaussian_max_selected;
  j["borda_order"] = config.borda_order == BordaOrder::Descending ? "descending" : "ascending";
  j["seed"] = config.seed;
  j["output"] = config.output.generic_string();
  return j;
}

void validate_config(const ExperimentConfig& config) {
  if (config.methods.empty()) throw Error(ErrorCode::InvalidConfig, "no methods configured");
  if (config.s_values.empty()) throw Error(ErrorCode::InvalidConfig, "no s values configured");
  if (config.datasets.empty()) throw Error(ErrorCode::InvalidConfig, "no dataset directories configured");
  std::set<std::string> unique;
  for (const auto& m : config.methods) {
    if (!methods::is_known(m)) throw Error(ErrorCode::InvalidConfig, "unknown method '" + m + "'");
    if (!unique.insert(m).second) throw Error(ErrorCode::InvalidConfig, "duplicate method '" + m + "'");
  }
  for (std::size_t s : config.s_values) {
    if (s == 0) throw Error(ErrorCode::InvalidConfig, "s values must be positive");
  }
  for (const auto& d : config.datasets) {
    if (!fs::is_directory(d)) throw Error(ErrorCode::MissingFile, "dataset directory not found: " + d.string());
  }
}

std::string sanitize_component(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '_' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  if (out.empty() || out == "." || out == "..") out = "%" + out;
  return out;
}

namespace {

struct CellStatus {
  std::size_t s = 0;
  std::string method;
  bool ok = true;
  std::string error;
  std::string message;
};

struct Task {
  std::size_t dataset_index = 0;
  int layer = 0;
  std::string concept_name;
};

struct TaskResult {
  std::uint64_t seed = 0;
  std::vector<CellStatus> cells;
  std::vector<CompatibilityReport> reports;
};

std::string error_name(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
  return "InternalError";
}

TaskResult run_task(const ExperimentConfig& config, const Dataset& data, const Task& task) {
  TaskResult result;
  result.seed = derive_seed(config.seed, task.concept_name);
  const std::vector<std::string> methods = order_methods(config.methods);

  auto fail_all = [&](const std::vector<std::string>& which, std::size_t s, const std::string& err,
                      const std::string& msg) {
    for (const auto& m : which) result.cells.push_back({s, m, false, err, msg});
  };

  ConceptDataset dataset;
  try {
    dataset = build_concept_dataset(data.tokens, task.concept_name, result.seed);
  } catch (const std::exception& e) {
    for (std::size_t s : config.s_values) fail_all(methods, s, error_name(e), e.what());
    return result;
  }

  std::vector<NeuronRanking> rankings;
  std::map<std::string, std::pair<std::string, std::string>> method_errors;
  for (const auto& m : methods) {
    try {
      rankings.push_back(run_method(m, data.matrix, dataset, config.settings));
    } catch (const std::exception& e) {
      method_errors[m] = {error_name(e), e.what()};
    }
  }

  MethodPool pool(task.concept_name, data.matrix.layer());
  std::vector<NeuronRanking> extras;
  for (auto& r : rankings) {
    if (methods::is_pool_member(r.method)) {
      pool.add(r);
    } else {
      extras.push_back(r);
    }
  }

  for (std::size_t s : config.s_values) {
    std::vector<std::string> ranked;
    for (const auto& m : methods) {
      if (const auto it = method_errors.find(m); it != method_errors.end()) {
        result.cells.push_back({s, m, false, it->second.first, it->second.second});
      } else {
        ranked.push_back(m);
      }
    }
    try {
      result.reports.push_back(leave_one_out_report(pool, extras, s, config.borda_order));
      for (const auto& m : ranked) result.cells.push_back({s, m, true, {}, {}});
    } catch (const std::exception& e) {
      fail_all(ranked, s, error_name(e), e.what());
    }
  }
  return result;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  writer(out);
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate_config(config);

  std::vector<Dataset> datasets;
  std::set<int> layers;
  for (const auto& dir : config.datasets) {
    datasets.push_back(load_dataset(dir));
    if (!layers.insert(datasets.back().matrix.layer()).second) {
      throw Error(ErrorCode::InvalidConfig,
                  "two dataset directories share layer " + std::to_string(datasets.back().matrix.layer()));
    }
  }

  std::vector<std::size_t> dataset_order(datasets.size());
  for (std::size_t i = 0; i < dataset_order.size(); ++i) dataset_order[i] = i;
  std::sort(dataset_order.begin(), dataset_order.end(), [&](std::size_t a, std::size_t b) {
    return datasets[a].matrix.layer() < datasets[b].matrix.layer();
  });

  std::vector<Task> tasks;
  for (std::size_t idx : dataset_order) {
    const auto& data = datasets[idx];
    std::vector<std::string> concepts = config.concepts;
    if (concepts.empty()) concepts = frequent_concepts(data.tokens);
    for (auto& c : concepts) tasks.push_back({idx, data.matrix.layer(), std::move(c)});
  }

  std::vector<TaskResult> results(tasks.size());
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) {
        results[i] = run_task(config, datasets[tasks[i].dataset_index], tasks[i]);
      }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, tasks.size()));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  // Output is written sequentially, in task order, after all cells finish.
  const fs::path root = config.output;
  std::error_code ec;
  fs::create_directories(root, ec);
  for (const char* sub : {"cells", "tables", "heatmaps"}) {
    fs::remove_all(root / sub, ec);
    fs::create_directories(root / sub, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (root / sub).string());
  }

  ExperimentSummary summary;
  std::vector<CompatibilityReport> all_reports;
  Json cells = Json::array();
  Json concept_seeds = Json::object();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& task = tasks[i];
    auto& result = results[i];
    concept_seeds[task.concept_name] = result.seed;
    for (const auto& cell : result.cells) {
      Json entry{{"layer", task.layer},
                 {"concept", task.concept_name},
                 {"s", cell.s},
                 {"method", cell.method},
                 {"status", cell.ok ? "succeeded" : "failed"}};
      if (!cell.ok) {
        entry["error"] = cell.error;
        entry["message"] = cell.message;
        ++summary.cells_failed;
      } else {
        ++summary.cells_succeeded;
      }
      cells.push_back(std::move(entry));
    }
    for (auto& report : result.reports) {
      const fs::path rel = fs::path("cells") / ("layer" + std::to_string(task.layer) + "_" +
                                                sanitize_component(task.concept_name) + "_s" +
                                                std::to_string(report.s) + ".json");
      write_text(root / rel, to_json(report).dump(2) + "\n");
      summary.files.push_back(rel);
      all_reports.push_back(std::move(report));
    }
  }

  const AggregateReport aggregate = aggregate_cells(all_reports);
  const fs::path avg_rel = fs::path("tables") / "avg_overlap.csv";
  const fs::path vote_rel = fs::path("tables") / "neuron_vote.csv";
  write_stream(root / avg_rel, [&](std::ostream& o) { write_scores_csv(o, aggregate, Metric::AvgOverlap); });
  write_stream(root / vote_rel, [&](std::ostream& o) { write_scores_csv(o, aggregate, Metric::NeuronVote); });
  summary.files.push_back(avg_rel);
  summary.files.push_back(vote_rel);
  for (const auto& [key, matrix] : aggregate.heatmaps) {
    const fs::path rel = fs::path("heatmaps") /
                         ("layer" + std::to_string(key.first) + "_s" + std::to_string(key.second) + ".csv");
    write_stream(root / rel, [&](std::ostream& o) { write_pairwise_csv(o, matrix); });
    summary.files.push_back(rel);
  }
  const fs::path scale_rel = fs::path("heatmaps") / "colour_scale.json";
  const Json scale{{"min", 0.0}, {"max", 1.0}, {"colormap", "Blues"}, {"diagonal", 1.0}};
  write_text(root / scale_rel, scale.dump(2) + "\n");
  summary.files.push_back(scale_rel);

  const Json config_json = to_json(config);
  Json manifest;
  manifest["tool"] = "neurovote";
  manifest["format_version"] = 1;
  manifest["config"] = config_json;
  manifest["config_hash"] = hex64(fnv1a64(config_json.dump()));
  manifest["root_seed"] = config.seed;
  manifest["concept_seeds"] = std::move(concept_seeds);
  manifest["cells_succeeded"] = summary.cells_succeeded;
  manifest["cells_failed"] = summary.cells_failed;
  manifest["partial_failure"] = summary.partial_failure();
  manifest["cells"] = std::move(cells);
  Json files = Json::array();
  for (const auto& f : summary.files) files.push_back(f.generic_string());
  manifest["files"] = std::move(files);
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
  summary.files.push_back("manifest.json");
  return summary;
}

}  // namespace neurovote
