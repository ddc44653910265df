#include "wordeval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include <json.hpp>

namespace wordeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using LoadedDataset =
    std::variant<SimilarityDataset, AnalogyDataset, CategorizationDataset,
                 OutlierDataset, LinguisticMatrix, SequenceCorpus>;

VectorFormat parse_vector_format(const std::string& s) {
  if (s == "text") return VectorFormat::TextAuto;
  if (s == "text-header") return VectorFormat::TextHeader;
  if (s == "text-noheader") return VectorFormat::TextNoHeader;
  if (s == "binary") return VectorFormat::Binary;
  throw Error(ErrorKind::Invalid, "unknown vector format '" + s + "'");
}

DatasetKind parse_dataset_kind(const std::string& s) {
  if (s == "similarity") return DatasetKind::Similarity;
  if (s == "analogy") return DatasetKind::Analogy;
  if (s == "categorization") return DatasetKind::Categorization;
  if (s == "outliers") return DatasetKind::Outliers;
  if (s == "linguistic") return DatasetKind::Linguistic;
  if (s == "conll") return DatasetKind::Conll;
  throw Error(ErrorKind::Invalid, "unknown dataset kind '" + s + "'");
}

TaskType parse_task_type(const std::string& s) {
  if (s == "similarity") return TaskType::Similarity;
  if (s == "analogy") return TaskType::Analogy;
  if (s == "categorization") return TaskType::Categorization;
  if (s == "outlier") return TaskType::Outlier;
  if (s == "qvec") return TaskType::Qvec;
  if (s == "tagging") return TaskType::Tagging;
  throw Error(ErrorKind::Invalid, "unknown task type '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "higher-better") return Direction::HigherBetter;
  if (s == "lower-better") return Direction::LowerBetter;
  throw Error(ErrorKind::Invalid, "unknown direction '" + s + "'");
}

std::string require_string(const json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(ErrorKind::Invalid,
                std::string(where) + " entry needs a string '" + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig config;
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("report_formats")) {
    config.report_formats.clear();
    for (const auto& f : j["report_formats"]) {
      config.report_formats.push_back(f.get<std::string>());
    }
  }
  for (const auto& m : j.value("models", json::array())) {
    ModelEntry entry;
    entry.name = require_string(m, "name", "model");
    entry.path = require_string(m, "path", "model");
    if (m.contains("format")) {
      entry.format = parse_vector_format(m["format"].get<std::string>());
    }
    config.models.push_back(std::move(entry));
  }
  for (const auto& d : j.value("datasets", json::array())) {
    DatasetEntry entry;
    entry.name = require_string(d, "name", "dataset");
    entry.kind = parse_dataset_kind(require_string(d, "kind", "dataset"));
    entry.path = require_string(d, "path", "dataset");
    if (d.contains("format")) {
      std::string f = d["format"].get<std::string>();
      if (entry.kind == DatasetKind::Analogy) {
        if (f == "google") {
          entry.analogy_format = AnalogyFormat::Google;
        } else if (f == "msr-4col") {
          entry.analogy_format = AnalogyFormat::Msr4Col;
        } else {
          throw Error(ErrorKind::Invalid, "unknown analogy format '" + f + "'");
        }
      } else if (entry.kind == DatasetKind::Outliers) {
        if (f == "wordsim500") {
          entry.outlier_format = OutlierFormat::WordSim500;
        } else if (f == "8-8-8") {
          entry.outlier_format = OutlierFormat::Eight888;
        } else {
          throw Error(ErrorKind::Invalid, "unknown outlier format '" + f + "'");
        }
      } else {
        throw Error(ErrorKind::Invalid,
                    "dataset '" + entry.name + "' does not take a format");
      }
    }
    config.datasets.push_back(std::move(entry));
  }
  for (const auto& t : j.value("tasks", json::array())) {
    TaskEntry entry;
    entry.type = parse_task_type(require_string(t, "type", "task"));
    if (entry.type == TaskType::Tagging) {
      entry.train_dataset = require_string(t, "train", "tagging task");
      entry.dataset = require_string(t, "test", "tagging task");
      if (t.contains("hidden")) entry.tagger.hidden = t["hidden"].get<std::size_t>();
      if (t.contains("epochs")) entry.tagger.epochs = t["epochs"].get<std::size_t>();
      if (t.contains("batch_size")) {
        entry.tagger.batch_size = t["batch_size"].get<std::size_t>();
      }
      if (t.contains("learning_rate")) {
        entry.tagger.learning_rate = t["learning_rate"].get<double>();
      }
    } else {
      entry.dataset = require_string(t, "dataset", "task");
    }
    if (t.contains("methods")) {
      entry.analogy_methods.clear();
      for (const auto& m : t["methods"]) {
        entry.analogy_methods.push_back(m.get<std::string>());
      }
    }
    if (t.contains("clamp_negative")) {
      entry.qvec_clamp_negative = t["clamp_negative"].get<bool>();
    }
    config.tasks.push_back(std::move(entry));
  }
  for (const auto& e : j.value("external_scores", json::array())) {
    ExternalScore score;
    score.model = require_string(e, "model", "external score");
    score.metric = require_string(e, "metric", "external score");
    if (!e.contains("value") || !e["value"].is_number()) {
      throw Error(ErrorKind::Invalid, "external score entry needs a numeric value");
    }
    score.value = e["value"].get<double>();
    if (e.contains("direction")) {
      score.direction = parse_direction(e["direction"].get<std::string>());
    }
    if (e.contains("kind")) {
      std::string k = e["kind"].get<std::string>();
      if (k == "intrinsic") {
        score.kind = MetricKind::Intrinsic;
      } else if (k == "extrinsic") {
        score.kind = MetricKind::Extrinsic;
      } else {
        throw Error(ErrorKind::Invalid, "unknown metric kind '" + k + "'");
      }
    }
    config.external_scores.push_back(std::move(score));
  }
  validate_config(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open config file " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate_config(const RunConfig& config) {
  if (config.models.empty()) {
    throw Error(ErrorKind::Invalid, "config declares no models");
  }
  if (config.tasks.empty()) {
    throw Error(ErrorKind::Invalid, "config declares no tasks");
  }
  std::map<std::string, DatasetKind> dataset_kinds;
  std::set<std::string> names;
  for (const auto& m : config.models) {
    if (m.path.empty()) {
      throw Error(ErrorKind::Invalid, "model '" + m.name + "' has an empty path");
    }
    if (!names.insert("m:" + m.name).second) {
      throw Error(ErrorKind::Invalid, "duplicate model name '" + m.name + "'");
    }
  }
  for (const auto& d : config.datasets) {
    if (d.path.empty()) {
      throw Error(ErrorKind::Invalid, "dataset '" + d.name + "' has an empty path");
    }
    if (!names.insert("d:" + d.name).second) {
      throw Error(ErrorKind::Invalid, "duplicate dataset name '" + d.name + "'");
    }
    dataset_kinds[d.name] = d.kind;
  }
  auto require_dataset = [&](const std::string& name, DatasetKind kind,
                             const char* what) {
    auto it = dataset_kinds.find(name);
    if (it == dataset_kinds.end()) {
      throw Error(ErrorKind::Invalid,
                  std::string(what) + " references undeclared dataset '" + name + "'");
    }
    if (it->second != kind) {
      throw Error(ErrorKind::Invalid, "dataset '" + name +
                                          "' has the wrong kind for " + what);
    }
  };
  for (const auto& t : config.tasks) {
    switch (t.type) {
      case TaskType::Similarity:
        require_dataset(t.dataset, DatasetKind::Similarity, "similarity task");
        break;
      case TaskType::Analogy:
        require_dataset(t.dataset, DatasetKind::Analogy, "analogy task");
        if (t.analogy_methods.empty()) {
          throw Error(ErrorKind::Invalid, "analogy task lists no methods");
        }
        for (const auto& m : t.analogy_methods) {
          if (m != "add" && m != "mul") {
            throw Error(ErrorKind::Invalid, "unknown analogy method '" + m + "'");
          }
        }
        break;
      case TaskType::Categorization:
        require_dataset(t.dataset, DatasetKind::Categorization,
                        "categorization task");
        break;
      case TaskType::Outlier:
        require_dataset(t.dataset, DatasetKind::Outliers, "outlier task");
        break;
      case TaskType::Qvec:
        require_dataset(t.dataset, DatasetKind::Linguistic, "qvec task");
        break;
      case TaskType::Tagging:
        require_dataset(t.train_dataset, DatasetKind::Conll, "tagging task");
        require_dataset(t.dataset, DatasetKind::Conll, "tagging task");
        break;
    }
  }
  for (const auto& f : config.report_formats) {
    if (f != "csv" && f != "json") {
      throw Error(ErrorKind::Invalid, "unknown report format '" + f + "'");
    }
  }
}

namespace {

VecStore load_store(const ModelEntry& entry) {
  std::ifstream in(entry.path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open vector file " + entry.path);
  }
  switch (entry.format) {
    case VectorFormat::TextAuto:
      return VecStore::load_text(in, TextHeader::Auto);
    case VectorFormat::TextHeader:
      return VecStore::load_text(in, TextHeader::Present);
    case VectorFormat::TextNoHeader:
      return VecStore::load_text(in, TextHeader::Absent);
    case VectorFormat::Binary:
      return VecStore::load_binary(in);
  }
  throw Error(ErrorKind::Invalid, "unreachable vector format");
}

LoadedDataset load_dataset(const DatasetEntry& entry) {
  std::ifstream in(entry.path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open dataset file " + entry.path);
  }
  switch (entry.kind) {
    case DatasetKind::Similarity:
      return parse_similarity(in, entry.name);
    case DatasetKind::Analogy:
      return parse_analogy(in, entry.analogy_format, entry.name);
    case DatasetKind::Categorization:
      return parse_categorization(in, entry.name);
    case DatasetKind::Outliers:
      return parse_outliers(in, entry.outlier_format, entry.name);
    case DatasetKind::Linguistic:
      return parse_linguistic_matrix(in, entry.name);
    case DatasetKind::Conll:
      return parse_conll(in, entry.name);
  }
  throw Error(ErrorKind::Invalid, "unreachable dataset kind");
}

std::size_t dataset_item_count(const LoadedDataset& ds) {
  return std::visit(
      [](const auto& d) -> std::size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SimilarityDataset>) {
          return d.pairs.size();
        } else if constexpr (std::is_same_v<T, AnalogyDataset>) {
          return d.question_count();
        } else if constexpr (std::is_same_v<T, CategorizationDataset>) {
          return d.entries.size();
        } else if constexpr (std::is_same_v<T, OutlierDataset>) {
          return d.groups.size();
        } else if constexpr (std::is_same_v<T, LinguisticMatrix>) {
          return d.vocab.size();
        } else {
          return d.sentences.size();
        }
      },
      ds);
}

// A unit of evaluation work plus everything needed to place its result.
struct Cell {
  std::size_t model_index;
  const TaskEntry* task;
  std::string task_label;
  std::string metric;
  AnalogyMethod analogy_method;
  bool is_analogy_mul = false;
};

struct RunState {
  const RunConfig* config;
  std::vector<VecStore> stores;
  std::map<std::string, LoadedDataset> datasets;
  std::uint64_t seed;
};

CellResult run_cell(const RunState& state, const Cell& cell) {
  const RunConfig& config = *state.config;
  CellResult result;
  result.model = config.models[cell.model_index].name;
  result.task = cell.task_label;
  result.metric = cell.metric;
  try {
    const VecStore& store = state.stores[cell.model_index];
    const TaskEntry& task = *cell.task;
    switch (task.type) {
      case TaskType::Similarity:
        result.score = eval_similarity(
            store, std::get<SimilarityDataset>(state.datasets.at(task.dataset)));
        break;
      case TaskType::Analogy:
        result.score = eval_analogy(
            store, std::get<AnalogyDataset>(state.datasets.at(task.dataset)),
            cell.analogy_method);
        break;
      case TaskType::Categorization:
        result.score = eval_categorization(
            store,
            std::get<CategorizationDataset>(state.datasets.at(task.dataset)),
            state.seed, 10);
        break;
      case TaskType::Outlier:
        result.score = eval_outlier(
            store, std::get<OutlierDataset>(state.datasets.at(task.dataset)));
        break;
      case TaskType::Qvec:
        result.score =
            qvec(store, std::get<LinguisticMatrix>(state.datasets.at(task.dataset)),
                 task.qvec_clamp_negative);
        break;
      case TaskType::Tagging: {
        TaggerConfig tagger_config = task.tagger;
        tagger_config.seed = state.seed;
        result.score = eval_tagging(
            store, std::get<SequenceCorpus>(state.datasets.at(task.train_dataset)),
            std::get<SequenceCorpus>(state.datasets.at(task.dataset)),
            tagger_config);
        break;
      }
    }
  } catch (const Error& e) {
    result.error = e.what();
  }
  return result;
}

std::size_t effective_jobs(std::size_t requested, std::size_t cells) {
  std::size_t jobs = requested;
  if (jobs == 0) {
    if (const char* env = std::getenv("WORDEVAL_JOBS")) {
      char* end = nullptr;
      unsigned long parsed = std::strtoul(env, &end, 10);
      if (end && *end == '\0' && parsed > 0) jobs = parsed;
    }
  }
  if (jobs == 0) {
    jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  return std::max<std::size_t>(1, std::min(jobs, cells));
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  }
  out << contents;
  if (!out) {
    throw Error(ErrorKind::Io, "write failure on " + path.string());
  }
}

}  // namespace

ReportBundle run(const RunConfig& config, const RunOptions& options) {
  validate_config(config);
  const std::string out_dir = options.output_dir.value_or(config.output_dir);
  const std::uint64_t seed = options.seed.value_or(config.seed);
  const std::vector<std::string> formats =
      options.report_formats.value_or(config.report_formats);
  for (const auto& f : formats) {
    if (f != "csv" && f != "json") {
      throw Error(ErrorKind::Invalid, "unknown report format '" + f + "'");
    }
  }

  RunState state;
  state.config = &config;
  state.seed = seed;
  for (const auto& m : config.models) state.stores.push_back(load_store(m));
  for (const auto& d : config.datasets) {
    state.datasets.emplace(d.name, load_dataset(d));
  }

  // Cell list in fixed (model-major, task, method) order.
  std::vector<Cell> cells;
  for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
    for (const auto& task : config.tasks) {
      switch (task.type) {
        case TaskType::Similarity:
          cells.push_back({mi, &task, "similarity/" + task.dataset,
                           task.dataset, {}, false});
          break;
        case TaskType::Analogy:
          for (const auto& method : task.analogy_methods) {
            AnalogyMethod m;
            m.kind = method == "mul" ? AnalogyMethod::CosMul : AnalogyMethod::CosAdd;
            cells.push_back({mi, &task, "analogy/" + task.dataset + "-" + method,
                             task.dataset + "-" + method, m, method == "mul"});
          }
          break;
        case TaskType::Categorization:
          cells.push_back({mi, &task, "categorization/" + task.dataset,
                           task.dataset, {}, false});
          break;
        case TaskType::Outlier:
          cells.push_back({mi, &task, "outlier/" + task.dataset,
                           task.dataset + "-accuracy", {}, false});
          break;
        case TaskType::Qvec:
          cells.push_back({mi, &task, "qvec/" + task.dataset, task.dataset,
                           {}, false});
          break;
        case TaskType::Tagging:
          cells.push_back({mi, &task, "tagging/" + task.dataset, task.dataset,
                           {}, false});
          break;
      }
    }
  }

  // Run cells; results land in their slots so scheduling cannot reorder them.
  std::vector<CellResult> results(cells.size());
  std::size_t jobs = effective_jobs(options.jobs, cells.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      results[i] = run_cell(state, cells[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) break;
          results[i] = run_cell(state, cells[i]);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  ReportBundle bundle;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    const CellResult& r = results[i];
    if (!r.score) {
      ++bundle.failed_cells;
      continue;
    }
    const EvalScore& score = *r.score;
    MetricKind kind = cell.task->type == TaskType::Tagging ? MetricKind::Extrinsic
                                                           : MetricKind::Intrinsic;
    bundle.table.set(r.model, {cell.metric, kind, score.direction}, score.primary);
    if (cell.task->type == TaskType::Outlier) {
      auto opp = score.components.find("opp");
      if (opp != score.components.end()) {
        bundle.table.set(r.model,
                         {cell.task->dataset + "-opp", kind, score.direction},
                         opp->second);
      }
    }
    if (cell.task->type == TaskType::Analogy) {
      const char* suffix = cell.is_analogy_mul ? "mul" : "add";
      for (const char* rollup : {"semantic", "syntactic"}) {
        auto it = score.components.find(rollup);
        if (it != score.components.end()) {
          std::string shorthand = rollup[1] == 'e' ? "sem" : "syn";
          bundle.table.set(
              r.model,
              {cell.task->dataset + "-" + shorthand + "-" + suffix, kind,
               score.direction},
              it->second);
        }
      }
    }
  }
  for (const auto& ext : config.external_scores) {
    bundle.table.set(ext.model, {ext.metric, ext.kind, ext.direction}, ext.value);
  }
  bundle.cells = std::move(results);

  if (options.with_correlation) {
    bundle.matrix = consistency_matrix(bundle.table);
  }

  // Emit reports.
  fs::create_directories(out_dir);
  bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  bool jsonfmt = std::find(formats.begin(), formats.end(), "json") != formats.end();

  if (csv) {
    std::ostringstream table_csv;
    write_score_table_csv(bundle.table, table_csv);
    write_file(fs::path(out_dir) / "score_table.csv", table_csv.str());
    bundle.files_written.push_back("score_table.csv");
    if (bundle.matrix) {
      std::ostringstream matrix_csv;
      write_matrix_csv(*bundle.matrix, matrix_csv);
      write_file(fs::path(out_dir) / "correlation.csv", matrix_csv.str());
      bundle.files_written.push_back("correlation.csv");
    }
  }
  if (jsonfmt) {
    json scores = json::array();
    for (const auto& r : bundle.cells) {
      json cell;
      cell["model"] = r.model;
      cell["task"] = r.task;
      cell["metric"] = r.metric;
      if (r.score) {
        cell["status"] = "ok";
        cell["evaluator"] = r.score->evaluator;
        cell["primary"] = r.score->primary;
        cell["coverage"] = r.score->coverage;
        cell["direction"] = direction_name(r.score->direction);
        cell["components"] = r.score->components;
      } else {
        cell["status"] = "error";
        cell["error"] = r.error;
      }
      scores.push_back(cell);
    }
    write_file(fs::path(out_dir) / "scores.json", scores.dump(2) + "\n");
    bundle.files_written.push_back("scores.json");
    if (bundle.matrix) {
      std::ostringstream matrix_json;
      write_matrix_json(*bundle.matrix, matrix_json);
      write_file(fs::path(out_dir) / "correlation.json", matrix_json.str());
      bundle.files_written.push_back("correlation.json");
    }
  }

  // Manifest: config hash, seed, inputs, per-cell status. No timestamps, so
  // identical configs rerun to identical bytes.
  json manifest;
  {
    json cfg_json;
    std::ostringstream canonical;
    canonical << seed << '|' << out_dir;
    for (const auto& m : config.models) canonical << '|' << m.name << ':' << m.path;
    for (const auto& d : config.datasets) canonical << '|' << d.name << ':' << d.path;
    for (const auto& t : config.tasks) canonical << '|' << t.dataset;
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(canonical.str())));
    manifest["config_hash"] = hash_hex;
  }
  manifest["seed"] = seed;
  manifest["report_formats"] = formats;
  json models = json::array();
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    models.push_back({{"name", config.models[i].name},
                      {"path", config.models[i].path},
                      {"vocab", state.stores[i].size()},
                      {"dim", state.stores[i].dim()}});
  }
  manifest["models"] = models;
  json datasets = json::array();
  for (const auto& d : config.datasets) {
    datasets.push_back({{"name", d.name},
                        {"path", d.path},
                        {"items", dataset_item_count(state.datasets.at(d.name))}});
  }
  manifest["datasets"] = datasets;
  json evals = json::array();
  for (const auto& r : bundle.cells) {
    json e;
    e["model"] = r.model;
    e["task"] = r.task;
    e["status"] = r.score ? "ok" : "error";
    if (r.score) {
      e["coverage"] = r.score->coverage;
    } else {
      e["error"] = r.error;
    }
    evals.push_back(e);
  }
  manifest["evaluations"] = evals;
  manifest["files"] = bundle.files_written;
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  bundle.files_written.push_back("manifest.json");

  return bundle;
}

}  // namespace wordeval
