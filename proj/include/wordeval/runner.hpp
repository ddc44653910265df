#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wordeval/analysis.hpp"
#include "wordeval/datasets.hpp"
#include "wordeval/extrinsic.hpp"
#include "wordeval/intrinsic.hpp"

namespace wordeval {

enum class VectorFormat { TextAuto, TextHeader, TextNoHeader, Binary };
enum class DatasetKind {
  Similarity,
  Analogy,
  Categorization,
  Outliers,
  Linguistic,
  Conll,
};

struct ModelEntry {
  std::string name;
  std::string path;
  VectorFormat format = VectorFormat::TextAuto;
};

struct DatasetEntry {
  std::string name;
  DatasetKind kind = DatasetKind::Similarity;
  std::string path;
  AnalogyFormat analogy_format = AnalogyFormat::Google;
  OutlierFormat outlier_format = OutlierFormat::WordSim500;
};

enum class TaskType {
  Similarity,
  Analogy,
  Categorization,
  Outlier,
  Qvec,
  Tagging,
};

struct TaskEntry {
  TaskType type = TaskType::Similarity;
  std::string dataset;            // evaluation dataset (intrinsic tasks)
  std::string train_dataset;      // tagging only
  std::vector<std::string> analogy_methods = {"add", "mul"};
  TaggerConfig tagger;            // tagging only; seed filled from config
  bool qvec_clamp_negative = false;
};

struct ExternalScore {
  std::string model;
  std::string metric;
  double value = 0.0;
  Direction direction = Direction::HigherBetter;
  MetricKind kind = MetricKind::Extrinsic;
};

struct RunConfig {
  std::vector<ModelEntry> models;
  std::vector<DatasetEntry> datasets;
  std::vector<TaskEntry> tasks;
  std::vector<ExternalScore> external_scores;
  std::uint64_t seed = 42;
  std::string output_dir = "reports";
  std::vector<std::string> report_formats = {"csv", "json"};
};

// Parses and validates the documented JSON config. Throws ErrorKind::Io for
// an unreadable file and ErrorKind::Invalid for schema or reference errors.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
void validate_config(const RunConfig& config);

struct RunOptions {
  std::optional<std::string> output_dir;  // overrides config
  std::optional<std::uint64_t> seed;      // overrides config
  std::optional<std::vector<std::string>> report_formats;
  std::size_t jobs = 0;  // 0 = WORDEVAL_JOBS env var, else hardware threads
  bool with_correlation = true;
};

// One evaluation cell: a (model, task[, method]) combination.
struct CellResult {
  std::string model;
  std::string task;    // stable task label, e.g. "analogy/google-add"
  std::string metric;  // primary metric name in the score table
  std::optional<EvalScore> score;  // empty on failure
  std::string error;               // failure message when score is empty
};

struct ReportBundle {
  ScoreTable table;
  std::vector<CellResult> cells;
  std::optional<CorrelationMatrix> matrix;
  std::vector<std::string> files_written;  // relative to the output dir
  std::size_t failed_cells = 0;
};

// Loads every model and dataset, runs all cells (possibly across threads),
// merges external scores, optionally computes the consistency matrix, and
// writes the report bundle deterministically.
ReportBundle run(const RunConfig& config, const RunOptions& options);

}  // namespace wordeval
