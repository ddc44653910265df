#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordeval/common.hpp"

namespace wordeval {

// What to do when a looked-up word is missing from the vocabulary.
// Skip: the lookup reports out-of-vocabulary and the caller drops the item.
// SharedUnk: every missing word maps to one shared vector (the mean of all
// rows), mirroring the frequency-threshold convention of embedding toolkits.
enum class OovPolicy { Skip, SharedUnk };

// Header handling for text vector files. Auto sniffs the first line.
enum class TextHeader { Present, Absent, Auto };

struct Neighbor {
  std::string word;
  double score;  // cosine similarity, in [-1, 1]
};

// Immutable vocabulary -> vector matrix. One row per word, working precision
// is always double; 32-bit floats appear only at the binary file boundary.
class VecStore {
 public:
  VecStore(std::vector<std::string> vocab, Eigen::MatrixXd matrix,
           OovPolicy policy = OovPolicy::Skip);

  static VecStore load_text(std::istream& in, TextHeader header,
                            OovPolicy policy = OovPolicy::Skip);
  static VecStore load_binary(std::istream& in,
                              OovPolicy policy = OovPolicy::Skip);

  // word2vec-style binary: "vocab dim\n", then per word the bytes of the
  // word, 0x20, and dim little-endian float32 values followed by '\n'.
  void save_binary(std::ostream& out) const;
  void save_text(std::ostream& out, bool with_header) const;

  std::size_t size() const { return vocab_.size(); }
  Eigen::Index dim() const { return matrix_.cols(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& word(std::size_t i) const { return vocab_[i]; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::MatrixXd::ConstRowXpr row(std::size_t i) const {
    return matrix_.row(static_cast<Eigen::Index>(i));
  }
  bool unit_normalized() const { return unit_normalized_; }
  OovPolicy oov_policy() const { return policy_; }

  // All-zero rows cannot participate in cosine space.
  bool usable(std::size_t i) const { return row_norms_[i] > 0.0; }
  double row_norm(std::size_t i) const { return row_norms_[i]; }

  // Exact-case hit first, then the ASCII-lowercased form. No stemming.
  std::optional<std::size_t> find(std::string_view word) const;

  // find() plus the OOV policy: nullopt only under Skip.
  std::optional<Eigen::VectorXd> lookup(std::string_view word) const;

  // The shared fallback vector: mean of all rows.
  const Eigen::VectorXd& unk_vector() const { return unk_; }

  // Row for a word if present, otherwise the shared UNK vector. This is the
  // feature-level convention of the extrinsic tagger regardless of policy.
  Eigen::VectorXd vector_or_unk(std::string_view word) const;

  // Top-k vocabulary words by cosine to the query. Excluded words and
  // unusable rows are omitted; ties break by ascending vocabulary index.
  std::vector<Neighbor> nearest(const Eigen::VectorXd& query, std::size_t k,
                                const std::vector<std::string>& exclude = {}) const;

  VecStore with_policy(OovPolicy policy) const;

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::MatrixXd matrix_;  // size() x dim()
  std::vector<double> row_norms_;
  Eigen::VectorXd unk_;
  bool unit_normalized_ = false;
  OovPolicy policy_;

  friend VecStore unit_normalize(const VecStore& store);
};

// cos(u, v) = u.v / (|u||v|). Zero-norm input is an error, distinct from OOV.
double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Copy of the store with every usable row scaled to unit norm. Zero rows
// stay zero and remain flagged unusable. Idempotent.
VecStore unit_normalize(const VecStore& store);

}  // namespace wordeval
