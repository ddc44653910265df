#include "wordeval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace wordeval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_csv_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse,
                "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Invalid, "pearson inputs differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorKind::Invalid, "pearson needs at least 2 observations");
  }
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::Eval, "pearson input has zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j share the same value; assign the average 1-based rank.
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Invalid, "spearman inputs differ in length");
  }
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

bool ScoreTable::has(std::size_t model, std::size_t metric) const {
  return !std::isnan(values[model][metric]);
}

std::size_t ScoreTable::metric_index(const std::string& name) const {
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].name == name) return i;
  }
  return static_cast<std::size_t>(-1);
}

void ScoreTable::set(const std::string& model, const MetricDesc& metric,
                     double value) {
  std::size_t mi = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i] == model) mi = i;
  }
  if (mi == static_cast<std::size_t>(-1)) {
    models.push_back(model);
    values.emplace_back(metrics.size(), kNaN);
    mi = models.size() - 1;
  }
  std::size_t ki = metric_index(metric.name);
  if (ki == static_cast<std::size_t>(-1)) {
    metrics.push_back(metric);
    for (auto& row : values) row.push_back(kNaN);
    ki = metrics.size() - 1;
  } else {
    const MetricDesc& existing = metrics[ki];
    if (existing.kind != metric.kind || existing.direction != metric.direction) {
      throw Error(ErrorKind::Invalid,
                  "metric '" + metric.name + "' redeclared with different "
                  "kind or direction");
    }
  }
  values[mi][ki] = value;
}

bool CorrelationMatrix::present(std::size_t i, std::size_t j) const {
  return !std::isnan(r[i][j]);
}

CorrelationMatrix consistency_matrix(const ScoreTable& table) {
  CorrelationMatrix m;
  std::vector<std::size_t> intr, extr;
  for (std::size_t i = 0; i < table.metrics.size(); ++i) {
    if (table.metrics[i].kind == MetricKind::Intrinsic) {
      intr.push_back(i);
      m.rows.push_back(table.metrics[i].name);
    } else {
      extr.push_back(i);
      m.cols.push_back(table.metrics[i].name);
    }
  }
  m.r.assign(intr.size(), std::vector<double>(extr.size(), kNaN));
  m.n.assign(intr.size(), std::vector<int>(extr.size(), 0));

  for (std::size_t a = 0; a < intr.size(); ++a) {
    for (std::size_t b = 0; b < extr.size(); ++b) {
      std::vector<double> x, y;
      for (std::size_t mi = 0; mi < table.models.size(); ++mi) {
        if (table.has(mi, intr[a]) && table.has(mi, extr[b])) {
          double xv = table.values[mi][intr[a]];
          double yv = table.values[mi][extr[b]];
          if (table.metrics[intr[a]].direction == Direction::LowerBetter) xv = -xv;
          if (table.metrics[extr[b]].direction == Direction::LowerBetter) yv = -yv;
          x.push_back(xv);
          y.push_back(yv);
        }
      }
      m.n[a][b] = static_cast<int>(x.size());
      if (x.size() < 2) continue;
      try {
        m.r[a][b] = pearson(x, y);
      } catch (const Error&) {
        // Constant inputs: the cell stays absent, never 0.
      }
    }
  }
  return m;
}

void write_matrix_csv(const CorrelationMatrix& m, std::ostream& out) {
  out << "intrinsic,extrinsic,r,n\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      out << m.rows[i] << ',' << m.cols[j] << ',';
      if (m.present(i, j)) out << format_double(m.r[i][j]);
      out << ',' << m.n[i][j] << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on matrix sink");
}

CorrelationMatrix read_matrix_csv(std::istream& in) {
  CorrelationMatrix m;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::Parse, "empty correlation matrix file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "intrinsic,extrinsic,r,n") {
    throw Error(ErrorKind::Parse, "bad matrix header: '" + line + "'");
  }
  std::vector<std::tuple<std::string, std::string, double, int>> cells;
  auto index_of = [](std::vector<std::string>& names, const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    names.push_back(name);
    return names.size() - 1;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    double r = f[2].empty() ? kNaN : parse_csv_double(f[2], line_no);
    int n = static_cast<int>(parse_csv_double(f[3], line_no));
    index_of(m.rows, f[0]);
    index_of(m.cols, f[1]);
    cells.emplace_back(f[0], f[1], r, n);
  }
  m.r.assign(m.rows.size(), std::vector<double>(m.cols.size(), kNaN));
  m.n.assign(m.rows.size(), std::vector<int>(m.cols.size(), 0));
  for (const auto& [row, col, r, n] : cells) {
    std::size_t i = index_of(m.rows, row);
    std::size_t j = index_of(m.cols, col);
    m.r[i][j] = r;
    m.n[i][j] = n;
  }
  return m;
}

void write_matrix_json(const CorrelationMatrix& m, std::ostream& out) {
  nlohmann::json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  nlohmann::json rj = nlohmann::json::array();
  nlohmann::json nj = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < m.cols.size(); ++k) {
      if (m.present(i, k)) {
        row.push_back(m.r[i][k]);
      } else {
        row.push_back(nullptr);
      }
    }
    rj.push_back(row);
    nj.push_back(m.n[i]);
  }
  j["r"] = rj;
  j["n"] = nj;
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failure on matrix sink");
}

void write_score_table_csv(const ScoreTable& table, std::ostream& out) {
  out << "model,metric,kind,direction,value\n";
  for (std::size_t mi = 0; mi < table.models.size(); ++mi) {
    for (std::size_t ki = 0; ki < table.metrics.size(); ++ki) {
      if (!table.has(mi, ki)) continue;
      const MetricDesc& d = table.metrics[ki];
      out << table.models[mi] << ',' << d.name << ','
          << (d.kind == MetricKind::Intrinsic ? "intrinsic" : "extrinsic") << ','
          << direction_name(d.direction) << ','
          << format_double(table.values[mi][ki]) << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on score table sink");
}

ScoreTable read_score_table_csv(std::istream& in) {
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::Parse, "empty score table file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "model,metric,kind,direction,value") {
    throw Error(ErrorKind::Parse, "bad score table header: '" + line + "'");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": expected 5 fields");
    }
    MetricKind kind;
    if (f[2] == "intrinsic") {
      kind = MetricKind::Intrinsic;
    } else if (f[2] == "extrinsic") {
      kind = MetricKind::Extrinsic;
    } else {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": bad metric kind '" + f[2] + "'");
    }
    Direction dir;
    if (f[3] == "higher-better") {
      dir = Direction::HigherBetter;
    } else if (f[3] == "lower-better") {
      dir = Direction::LowerBetter;
    } else {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": bad direction '" + f[3] + "'");
    }
    table.set(f[0], {f[1], kind, dir}, parse_csv_double(f[4], line_no));
  }
  return table;
}

}  // namespace wordeval
