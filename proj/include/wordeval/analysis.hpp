#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wordeval/common.hpp"

namespace wordeval {

// Sample Pearson correlation coefficient. Inputs must have equal length
// >= 2 and neither may be constant.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson over average-tied ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks with ties replaced by their average rank.
std::vector<double> average_ranks(std::span<const double> values);

enum class MetricKind { Intrinsic, Extrinsic };

struct MetricDesc {
  std::string name;
  MetricKind kind;
  Direction direction;
};

// Models x metrics score grid. Missing entries are NaN.
struct ScoreTable {
  std::vector<std::string> models;
  std::vector<MetricDesc> metrics;
  std::vector<std::vector<double>> values;  // [model][metric], NaN = missing

  bool has(std::size_t model, std::size_t metric) const;
  std::size_t metric_index(const std::string& name) const;  // npos if absent
  void set(const std::string& model, const MetricDesc& metric, double value);
};

// Intrinsic x extrinsic grid of Pearson r values. Cells with fewer than two
// paired models or constant inputs are absent (NaN, n recorded as observed).
struct CorrelationMatrix {
  std::vector<std::string> rows;  // intrinsic metric names
  std::vector<std::string> cols;  // extrinsic metric names
  std::vector<std::vector<double>> r;  // NaN = absent
  std::vector<std::vector<int>> n;     // models used per cell

  bool present(std::size_t i, std::size_t j) const;
};

// Pearson per (intrinsic, extrinsic) pair over the models that have both
// scores, with lower-better metrics sign-flipped before correlating.
CorrelationMatrix consistency_matrix(const ScoreTable& table);

// Long-form CSV, one line per cell: intrinsic,extrinsic,r,n with r empty
// for absent cells. Rows appear in matrix order, so output is deterministic.
void write_matrix_csv(const CorrelationMatrix& m, std::ostream& out);
CorrelationMatrix read_matrix_csv(std::istream& in);

// {"rows": [...], "cols": [...], "r": [[...]], "n": [[...]]}, null = absent.
void write_matrix_json(const CorrelationMatrix& m, std::ostream& out);

// Long-form CSV, one line per present score:
// model,metric,kind,direction,value
void write_score_table_csv(const ScoreTable& table, std::ostream& out);
ScoreTable read_score_table_csv(std::istream& in);

}  // namespace wordeval
