#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "wordeval/vecstore.hpp"

namespace wordeval {

struct SimilarityPair {
  std::string word1;
  std::string word2;
  double gold;  // human judgment, used ordinally only
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityPair> pairs;
};

// One analogy question "a : b :: c : d", where d is the gold answer.
struct AnalogyQuestion {
  std::string a;
  std::string b;
  std::string c;
  std::string d;
};

struct AnalogySection {
  std::string name;
  std::vector<AnalogyQuestion> questions;
};

struct AnalogyDataset {
  std::string name;
  std::vector<AnalogySection> sections;

  std::size_t question_count() const;
  // Google convention: a "gram" section-name prefix marks a syntactic
  // (morpho-syntactic) section; everything else counts as semantic.
  static bool syntactic_section(const std::string& section_name);
  std::size_t semantic_count() const;
  std::size_t syntactic_count() const;
};

enum class AnalogyFormat { Google, Msr4Col };

struct CategorizationEntry {
  std::string word;
  std::string category;
};

struct CategorizationDataset {
  std::string name;
  std::vector<CategorizationEntry> entries;
  std::vector<std::string> categories;  // distinct labels, in file order
};

// n member words plus one designated outlier.
struct OutlierGroup {
  std::vector<std::string> words;
  std::size_t outlier_index;
};

struct OutlierDataset {
  std::string name;
  std::vector<OutlierGroup> groups;
};

enum class OutlierFormat { WordSim500, Eight888 };

// Hand-built property vectors: |vocab| x |props|, sparse and mostly zero.
struct LinguisticMatrix {
  std::string name;
  std::vector<std::string> vocab;
  std::vector<std::string> props;
  Eigen::MatrixXd values;
};

enum class TagScheme { PerToken, BioSpans };

struct SequenceCorpus {
  std::string name;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::vector<std::string>> labels;  // parallel to sentences
  std::vector<std::string> tagset;               // distinct tags, sorted
  TagScheme scheme;
};

// Lines "word1<sep>word2<sep>score" with sep auto-detected per file from
// {tab, comma, whitespace} and required to be consistent. '#' comments.
SimilarityDataset parse_similarity(std::istream& in, std::string name);

// Google format: ": section-name" lines open sections, data lines hold four
// words. Msr4Col: four columns, one implicit section.
AnalogyDataset parse_analogy(std::istream& in, AnalogyFormat format,
                             std::string name);

// "word<TAB>category" lines; each word may appear once.
CategorizationDataset parse_categorization(std::istream& in, std::string name);

// Blank-line-separated blocks alternating (member words, outlier words).
// Each outlier word forms one group: the members plus that outlier, which
// sits at the last position. Eight888 requires exactly 8 members and 8
// outliers per block pair.
OutlierDataset parse_outliers(std::istream& in, OutlierFormat format,
                              std::string name);

// "word prop:value prop:value ..." lines, properties sparse.
LinguisticMatrix parse_linguistic_matrix(std::istream& in, std::string name);

// Whitespace-columned tokens, first column = token, last column = tag,
// blank lines end sentences. The scheme is sniffed from the tags: all of
// them O / B-* / I-* means BIO spans, anything else means per-token.
SequenceCorpus parse_conll(std::istream& in, std::string name);

void write_similarity(const SimilarityDataset& ds, std::ostream& out);
void write_analogy(const AnalogyDataset& ds, AnalogyFormat format,
                   std::ostream& out);
void write_categorization(const CategorizationDataset& ds, std::ostream& out);
void write_outliers(const OutlierDataset& ds, std::ostream& out);
void write_linguistic_matrix(const LinguisticMatrix& ds, std::ostream& out);
void write_conll(const SequenceCorpus& ds, std::ostream& out);

struct Coverage {
  std::size_t usable_items;
  std::size_t total_items;
  double ratio;  // usable / total; 0 when the dataset is empty
};

// An item is usable iff every word it references resolves in the store.
Coverage coverage(const SimilarityDataset& ds, const VecStore& store);
Coverage coverage(const AnalogyDataset& ds, const VecStore& store);
Coverage coverage(const CategorizationDataset& ds, const VecStore& store);
Coverage coverage(const OutlierDataset& ds, const VecStore& store);
Coverage coverage(const LinguisticMatrix& ds, const VecStore& store);
Coverage coverage(const SequenceCorpus& ds, const VecStore& store);

}  // namespace wordeval
