#include "wordeval/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace wordeval {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string token;
  while (ss >> token) out.push_back(token);
  return out;
}

std::vector<std::string> split_char(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) {
    // Trim surrounding spaces so "a, b, 1.0" parses cleanly.
    std::size_t b = field.find_first_not_of(" \t");
    std::size_t e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_score(const std::string& token, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                      ": unparsable score '" + token + "'");
  }
  return value;
}

bool skippable(const std::string& line) {
  if (line.empty()) return true;
  std::size_t i = line.find_first_not_of(" \t");
  return i == std::string::npos || line[i] == '#';
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::size_t AnalogyDataset::question_count() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.questions.size();
  return n;
}

bool AnalogyDataset::syntactic_section(const std::string& section_name) {
  return section_name.rfind("gram", 0) == 0;
}

std::size_t AnalogyDataset::semantic_count() const {
  std::size_t n = 0;
  for (const auto& s : sections) {
    if (!syntactic_section(s.name)) n += s.questions.size();
  }
  return n;
}

std::size_t AnalogyDataset::syntactic_count() const {
  return question_count() - semantic_count();
}

SimilarityDataset parse_similarity(std::istream& in, std::string name) {
  SimilarityDataset ds;
  ds.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  char sep = 0;  // 0 = whitespace, otherwise the literal separator
  bool sep_known = false;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (skippable(line)) continue;
    if (!sep_known) {
      if (line.find('\t') != std::string::npos) {
        sep = '\t';
      } else if (line.find(',') != std::string::npos) {
        sep = ',';
      }
      sep_known = true;
    }
    auto fields = sep == 0 ? split_ws(line) : split_char(line, sep);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) +
                      ": expected 'word1 word2 score' (inconsistent separator?)");
    }
    ds.pairs.push_back({fields[0], fields[1], parse_score(fields[2], line_no)});
  }
  if (ds.pairs.size() < 2) {
    throw Error(ErrorKind::Parse, "similarity dataset '" + ds.name +
                                      "' has fewer than 2 pairs");
  }
  return ds;
}

AnalogyDataset parse_analogy(std::istream& in, AnalogyFormat format,
                             std::string name) {
  AnalogyDataset ds;
  ds.name = std::move(name);
  std::unordered_set<std::string> section_names;
  if (format == AnalogyFormat::Msr4Col) {
    ds.sections.push_back({"all", {}});
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (skippable(line)) continue;
    if (format == AnalogyFormat::Google && line[0] == ':') {
      std::string section = line.substr(1);
      std::size_t b = section.find_first_not_of(" \t");
      if (b == std::string::npos) {
        throw Error(ErrorKind::Parse,
                    "line " + std::to_string(line_no) + ": empty section name");
      }
      section = section.substr(b);
      if (!section_names.insert(section).second) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": duplicate section '" + section + "'");
      }
      ds.sections.push_back({section, {}});
      continue;
    }
    auto words = split_ws(line);
    if (words.size() != 4) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": expected 4 words, got " +
                                        std::to_string(words.size()));
    }
    if (ds.sections.empty()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": question before any ': section' header");
    }
    ds.sections.back().questions.push_back(
        {words[0], words[1], words[2], words[3]});
  }
  return ds;
}

CategorizationDataset parse_categorization(std::istream& in, std::string name) {
  CategorizationDataset ds;
  ds.name = std::move(name);
  std::unordered_set<std::string> seen_words;
  std::unordered_set<std::string> seen_categories;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (skippable(line)) continue;
    std::string word, category;
    std::size_t tab = line.find('\t');
    if (tab != std::string::npos) {
      word = line.substr(0, tab);
      category = line.substr(tab + 1);
      std::size_t b = category.find_first_not_of(" \t");
      std::size_t e = category.find_last_not_of(" \t");
      category = b == std::string::npos ? std::string()
                                        : category.substr(b, e - b + 1);
    } else {
      auto fields = split_ws(line);
      if (fields.size() != 2) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": expected 'word<TAB>category'");
      }
      word = fields[0];
      category = fields[1];
    }
    if (word.empty() || category.empty()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": expected 'word<TAB>category'");
    }
    if (!seen_words.insert(word).second) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": duplicate word '" + word + "'");
    }
    if (seen_categories.insert(category).second) {
      ds.categories.push_back(category);
    }
    ds.entries.push_back({word, category});
  }
  if (ds.categories.size() < 2) {
    throw Error(ErrorKind::Parse, "categorization dataset '" + ds.name +
                                      "' needs at least 2 categories");
  }
  return ds;
}

OutlierDataset parse_outliers(std::istream& in, OutlierFormat format,
                              std::string name) {
  OutlierDataset ds;
  ds.name = std::move(name);
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> current;
  std::string line;
  while (std::getline(in, line)) {
    chomp(line);
    if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) {
      if (!current.empty()) {
        blocks.push_back(current);
        current.clear();
      }
      continue;
    }
    if (line[0] == '#') continue;
    std::size_t b = line.find_first_not_of(" \t");
    std::size_t e = line.find_last_not_of(" \t");
    current.push_back(line.substr(b, e - b + 1));
  }
  if (!current.empty()) blocks.push_back(current);
  if (blocks.empty()) {
    throw Error(ErrorKind::Parse, "outlier dataset '" + ds.name + "' is empty");
  }
  if (blocks.size() % 2 != 0) {
    throw Error(ErrorKind::Parse,
                "outlier dataset '" + ds.name +
                    "': blocks must alternate members / outliers");
  }
  for (std::size_t i = 0; i < blocks.size(); i += 2) {
    const auto& members = blocks[i];
    const auto& outliers = blocks[i + 1];
    if (format == OutlierFormat::Eight888 &&
        (members.size() != 8 || outliers.size() != 8)) {
      throw Error(ErrorKind::Parse,
                  "8-8-8 format expects 8 members and 8 outliers per cluster");
    }
    if (members.size() < 2) {
      throw Error(ErrorKind::Parse,
                  "outlier cluster needs at least 2 member words");
    }
    std::unordered_set<std::string> member_set(members.begin(), members.end());
    if (member_set.size() != members.size()) {
      throw Error(ErrorKind::Parse, "duplicate word within an outlier cluster");
    }
    for (const auto& outlier : outliers) {
      if (member_set.count(outlier)) {
        throw Error(ErrorKind::Parse,
                    "outlier '" + outlier + "' repeats a cluster member");
      }
      OutlierGroup group;
      group.words = members;
      group.words.push_back(outlier);
      group.outlier_index = members.size();
      ds.groups.push_back(std::move(group));
    }
  }
  return ds;
}

LinguisticMatrix parse_linguistic_matrix(std::istream& in, std::string name) {
  LinguisticMatrix m;
  m.name = std::move(name);
  std::unordered_map<std::string, std::size_t> prop_index;
  std::unordered_set<std::string> seen_words;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (skippable(line)) continue;
    auto tokens = split_ws(line);
    if (!seen_words.insert(tokens[0]).second) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": duplicate word '" + tokens[0] + "'");
    }
    m.vocab.push_back(tokens[0]);
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      std::size_t colon = tokens[t].rfind(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 == tokens[t].size()) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": expected 'property:value', got '" +
                                          tokens[t] + "'");
      }
      std::string prop = tokens[t].substr(0, colon);
      double value = parse_score(tokens[t].substr(colon + 1), line_no);
      auto [it, inserted] = prop_index.emplace(prop, m.props.size());
      if (inserted) m.props.push_back(prop);
      row.emplace_back(it->second, value);
    }
    rows.push_back(std::move(row));
  }
  if (m.vocab.empty()) {
    throw Error(ErrorKind::Parse, "linguistic matrix '" + m.name + "' is empty");
  }
  m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.vocab.size()),
                                   static_cast<Eigen::Index>(m.props.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i]) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return m;
}

SequenceCorpus parse_conll(std::istream& in, std::string name) {
  SequenceCorpus corpus;
  corpus.name = std::move(name);
  std::vector<std::string> tokens, tags;
  std::set<std::string> tagset;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&]() {
    if (!tokens.empty()) {
      corpus.sentences.push_back(tokens);
      corpus.labels.push_back(tags);
      tokens.clear();
      tags.clear();
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    auto cols = split_ws(line);
    if (cols.size() < 2) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": need at least token and tag columns");
    }
    tokens.push_back(cols.front());
    tags.push_back(cols.back());
    tagset.insert(cols.back());
  }
  flush();
  if (corpus.sentences.empty()) {
    throw Error(ErrorKind::Parse, "corpus '" + corpus.name + "' is empty");
  }
  corpus.tagset.assign(tagset.begin(), tagset.end());
  bool bio = true;
  for (const auto& tag : corpus.tagset) {
    if (tag == "O") continue;
    if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
      continue;
    }
    bio = false;
    break;
  }
  corpus.scheme = bio ? TagScheme::BioSpans : TagScheme::PerToken;
  return corpus;
}

void write_similarity(const SimilarityDataset& ds, std::ostream& out) {
  for (const auto& p : ds.pairs) {
    out << p.word1 << ' ' << p.word2 << ' ' << format_double(p.gold) << '\n';
  }
}

void write_analogy(const AnalogyDataset& ds, AnalogyFormat format,
                   std::ostream& out) {
  for (const auto& section : ds.sections) {
    if (format == AnalogyFormat::Google) out << ": " << section.name << '\n';
    for (const auto& q : section.questions) {
      out << q.a << ' ' << q.b << ' ' << q.c << ' ' << q.d << '\n';
    }
  }
}

void write_categorization(const CategorizationDataset& ds, std::ostream& out) {
  for (const auto& e : ds.entries) {
    out << e.word << '\t' << e.category << '\n';
  }
}

void write_outliers(const OutlierDataset& ds, std::ostream& out) {
  // Groups sharing a member block collapse back into one cluster section.
  std::size_t i = 0;
  bool first = true;
  while (i < ds.groups.size()) {
    std::vector<std::string> members(
        ds.groups[i].words.begin(),
        ds.groups[i].words.begin() +
            static_cast<std::ptrdiff_t>(ds.groups[i].outlier_index));
    std::size_t j = i;
    std::vector<std::string> outliers;
    while (j < ds.groups.size()) {
      std::vector<std::string> m2(
          ds.groups[j].words.begin(),
          ds.groups[j].words.begin() +
              static_cast<std::ptrdiff_t>(ds.groups[j].outlier_index));
      if (m2 != members) break;
      outliers.push_back(ds.groups[j].words[ds.groups[j].outlier_index]);
      ++j;
    }
    if (!first) out << '\n';
    first = false;
    for (const auto& w : members) out << w << '\n';
    out << '\n';
    for (const auto& w : outliers) out << w << '\n';
    i = j;
  }
}

void write_linguistic_matrix(const LinguisticMatrix& ds, std::ostream& out) {
  for (std::size_t i = 0; i < ds.vocab.size(); ++i) {
    out << ds.vocab[i];
    for (std::size_t j = 0; j < ds.props.size(); ++j) {
      double v = ds.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) out << ' ' << ds.props[j] << ':' << format_double(v);
    }
    out << '\n';
  }
}

void write_conll(const SequenceCorpus& ds, std::ostream& out) {
  for (std::size_t s = 0; s < ds.sentences.size(); ++s) {
    if (s > 0) out << '\n';
    for (std::size_t t = 0; t < ds.sentences[s].size(); ++t) {
      out << ds.sentences[s][t] << '\t' << ds.labels[s][t] << '\n';
    }
  }
}

namespace {

bool resolves(const VecStore& store, const std::string& word) {
  return store.lookup(word).has_value();
}

Coverage make_coverage(std::size_t usable, std::size_t total) {
  return {usable, total,
          total == 0 ? 0.0 : static_cast<double>(usable) / static_cast<double>(total)};
}

}  // namespace

Coverage coverage(const SimilarityDataset& ds, const VecStore& store) {
  std::size_t usable = 0;
  for (const auto& p : ds.pairs) {
    if (resolves(store, p.word1) && resolves(store, p.word2)) ++usable;
  }
  return make_coverage(usable, ds.pairs.size());
}

Coverage coverage(const AnalogyDataset& ds, const VecStore& store) {
  std::size_t usable = 0;
  for (const auto& s : ds.sections) {
    for (const auto& q : s.questions) {
      if (resolves(store, q.a) && resolves(store, q.b) &&
          resolves(store, q.c) && resolves(store, q.d)) {
        ++usable;
      }
    }
  }
  return make_coverage(usable, ds.question_count());
}

Coverage coverage(const CategorizationDataset& ds, const VecStore& store) {
  std::size_t usable = 0;
  for (const auto& e : ds.entries) {
    if (resolves(store, e.word)) ++usable;
  }
  return make_coverage(usable, ds.entries.size());
}

Coverage coverage(const OutlierDataset& ds, const VecStore& store) {
  std::size_t usable = 0;
  for (const auto& g : ds.groups) {
    bool all = true;
    for (const auto& w : g.words) all = all && resolves(store, w);
    if (all) ++usable;
  }
  return make_coverage(usable, ds.groups.size());
}

Coverage coverage(const LinguisticMatrix& ds, const VecStore& store) {
  std::size_t usable = 0;
  for (const auto& w : ds.vocab) {
    if (resolves(store, w)) ++usable;
  }
  return make_coverage(usable, ds.vocab.size());
}

Coverage coverage(const SequenceCorpus& ds, const VecStore& store) {
  std::size_t usable = 0;
  std::size_t total = 0;
  for (const auto& sentence : ds.sentences) {
    total += sentence.size();
    for (const auto& token : sentence) {
      if (resolves(store, token)) ++usable;
    }
  }
  return make_coverage(usable, total);
}

}  // namespace wordeval
