#include "neurovote/serialization.hpp"

#include <charconv>
#include <cmath>

#include "neurovote/error.hpp"

namespace neurovote {

namespace {

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  throw Error(ErrorCode::InvalidFormat, "unknown split '" + s + "'");
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidFormat, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json to_json(const ConceptDataset& dataset) {
  Json j;
  j["concept"] = dataset.concept_name;
  j["seed"] = dataset.seed;
  j["positive_rows"] = dataset.positive_rows;
  j["negative_rows"] = dataset.negative_rows;
  Json split = Json::array();
  for (Split s : dataset.split) split.push_back(std::string(to_string(s)));
  j["split"] = std::move(split);
  return j;
}

ConceptDataset concept_dataset_from_json(const Json& j) {
  return guarded("concept dataset", [&] {
    ConceptDataset ds;
    ds.concept_name = j.at("concept").get<std::string>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.positive_rows = j.at("positive_rows").get<std::vector<std::size_t>>();
    ds.negative_rows = j.at("negative_rows").get<std::vector<std::size_t>>();
    for (const auto& s : j.at("split")) ds.split.push_back(split_from_string(s.get<std::string>()));
    if (ds.split.size() != ds.size()) {
      throw Error(ErrorCode::InvalidFormat, "split length does not match example count");
    }
    return ds;
  });
}

Json to_json(const TrainConfig& config) {
  Json j;
  j["lambda1"] = config.lambda1;
  j["lambda2"] = config.lambda2;
  j["learning_rate"] = config.learning_rate;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["seed"] = config.seed;
  return j;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig defaults) {
  return guarded("train config", [&] {
    TrainConfig c = defaults;
    c.lambda1 = j.value("lambda1", c.lambda1);
    c.lambda2 = j.value("lambda2", c.lambda2);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    return c;
  });
}

Json to_json(const ProbeModel& model) {
  Json j;
  j["theta"] = model.theta;
  j["bias"] = model.bias;
  j["config"] = to_json(model.config);
  j["final_train_loss"] = model.final_train_loss;
  j["dev_accuracy"] = model.dev_accuracy;  // NaN serializes as null
  j["epoch_losses"] = model.epoch_losses;
  j["feature_columns"] = model.feature_columns;
  j["standardizer"] = {{"mean", model.standardizer.mean()}, {"stddev", model.standardizer.stddev()}};
  return j;
}

ProbeModel probe_model_from_json(const Json& j) {
  return guarded("probe model", [&] {
    ProbeModel m;
    m.theta = j.at("theta").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.config = train_config_from_json(j.at("config"));
    m.final_train_loss = j.at("final_train_loss").get<double>();
    const auto& dev = j.at("dev_accuracy");
    m.dev_accuracy = dev.is_null() ? std::nan("") : dev.get<double>();
    m.epoch_losses = j.value("epoch_losses", std::vector<double>{});
    m.feature_columns = j.value("feature_columns", std::vector<std::size_t>{});
    if (j.contains("standardizer")) {
      const auto& s = j.at("standardizer");
      m.standardizer = Standardizer(s.at("mean").get<std::vector<double>>(),
                                    s.at("stddev").get<std::vector<double>>());
    }
    return m;
  });
}

Json to_json(const NeuronRanking& ranking, std::optional<std::size_t> s) {
  Json j;
  j["method"] = ranking.method;
  j["concept"] = ranking.concept_name;
  j["layer"] = ranking.layer;
  if (s) j["s"] = *s;
  const std::size_t count = s ? std::min(*s, ranking.size()) : ranking.size();
  Json ordered = Json::array();
  for (std::size_t i = 0; i < count; ++i) {
    ordered.push_back(Json::array({ranking.ordered[i].id, ranking.ordered[i].score}));
  }
  j["ordered"] = std::move(ordered);
  return j;
}

NeuronRanking ranking_from_json(const Json& j) {
  return guarded("ranking", [&] {
    NeuronRanking r;
    r.method = j.at("method").get<std::string>();
    r.concept_name = j.at("concept").get<std::string>();
    r.layer = j.at("layer").get<int>();
    for (const auto& entry : j.at("ordered")) {
      r.ordered.push_back({entry.at(0).get<std::size_t>(), entry.at(1).get<double>()});
    }
    return r;
  });
}

Json to_json(const PairwiseMatrix& matrix) {
  Json j;
  j["methods"] = matrix.methods;
  Json rows = Json::array();
  const std::size_t k = matrix.methods.size();
  for (std::size_t i = 0; i < k; ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < k; ++c) row.push_back(matrix.at(i, c));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j;
}

Json to_json(const CompatibilityReport& report) {
  Json j;
  j["concept"] = report.concept_name;
  j["layer"] = report.layer;
  j["s"] = report.s;
  j["pool"] = report.pool_methods;
  j["extras"] = report.extra_methods;
  Json scores = Json::array();
  for (const auto& sc : report.scores) {
    scores.push_back({{"method", sc.method},
                      {"role", sc.voter ? "pool" : "extra"},
                      {"avg_overlap", sc.avg_overlap},
                      {"neuron_vote", sc.neuron_vote}});
  }
  j["scores"] = std::move(scores);
  j["pairwise"] = to_json(report.pairwise);
  return j;
}

Json to_json(const RecoveryScore& score) {
  return {{"method", score.method},
          {"s", score.s},
          {"hits", score.hits},
          {"precision_at_s", score.precision_at_s}};
}

Json to_json(const SynthConfig& config) {
  return {{"neurons", config.neurons},
          {"tokens", config.tokens},
          {"planted", config.planted},
          {"delta", config.delta},
          {"concept_fraction", config.concept_fraction},
          {"noise_std", config.noise_std},
          {"seed", config.seed},
          {"correlated", config.correlated},
          {"correlation", config.correlation},
          {"layer", config.layer},
          {"model", config.model}};
}

SynthConfig synth_config_from_json(const Json& j, SynthConfig defaults) {
  return guarded("synth config", [&] {
    SynthConfig c = defaults;
    c.neurons = j.value("neurons", c.neurons);
    c.tokens = j.value("tokens", c.tokens);
    c.planted = j.value("planted", c.planted);
    c.delta = j.value("delta", c.delta);
    c.concept_fraction = j.value("concept_fraction", c.concept_fraction);
    c.noise_std = j.value("noise_std", c.noise_std);
    c.seed = j.value("seed", c.seed);
    c.correlated = j.value("correlated", c.correlated);
    c.correlation = j.value("correlation", c.correlation);
    c.layer = j.value("layer", c.layer);
    c.model = j.value("model", c.model);
    return c;
  });
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_accuracy_csv(std::ostream& out, const AccuracyTable& table) {
  out << "method";
  for (std::size_t s : table.s_values) out << ',' << s;
  out << '\n';
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    out << table.methods[m];
    for (double a : table.accuracy[m]) out << ',' << format_number(a);
    out << '\n';
  }
}

void write_scores_csv(std::ostream& out, const AggregateReport& report, Metric metric) {
  auto pick = [metric](const MethodAggregate& agg) {
    return metric == Metric::AvgOverlap ? agg.avg_overlap : agg.neuron_vote;
  };
  out << "method,all";
  for (const auto& [layer, table] : report.per_layer) out << ",layer_" << layer;
  out << '\n';
  for (const auto& method : report.methods) {
    out << method << ',' << format_number(pick(report.overall.at(method)));
    for (const auto& [layer, table] : report.per_layer) {
      const auto it = table.find(method);
      out << ',' << (it == table.end() ? std::string() : format_number(pick(it->second)));
    }
    out << '\n';
  }
}

void write_pairwise_csv(std::ostream& out, const PairwiseMatrix& matrix) {
  out << "method";
  for (const auto& m : matrix.methods) out << ',' << m;
  out << '\n';
  for (std::size_t i = 0; i < matrix.methods.size(); ++i) {
    out << matrix.methods[i];
    for (std::size_t j = 0; j < matrix.methods.size(); ++j) out << ',' << format_number(matrix.at(i, j));
    out << '\n';
  }
}

}  // namespace neurovote
