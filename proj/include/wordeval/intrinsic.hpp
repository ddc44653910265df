#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wordeval/datasets.hpp"
#include "wordeval/vecstore.hpp"

namespace wordeval {

// One evaluator's result. Scores are stored in raw units ([0,1] or [-1,1]);
// the x100 of the reference tables is applied only at report time.
struct EvalScore {
  std::string evaluator;
  double primary = 0.0;
  std::map<std::string, double> components;
  double coverage = 0.0;
  Direction direction = Direction::HigherBetter;
};

struct AnalogyMethod {
  enum Kind { CosAdd, CosMul } kind = CosAdd;
  double epsilon = 0.001;  // CosMul division guard
};

// Spearman rank correlation between pair cosines and gold judgments over the
// usable pairs. Components carry the Pearson r and the usable-pair count.
EvalScore eval_similarity(const VecStore& store, const SimilarityDataset& ds);

// Vocabulary argmax for "a : b :: c : ?" with the three query words excluded
// from the candidate set. CosAdd scores cos(w, b - a + c); CosMul maps
// cosines through (x+1)/2 and scores s(w,c) * s(w,b) / (s(w,a) + eps).
// nullopt when any query word is out of vocabulary (unanswerable).
std::optional<std::string> solve_analogy(const VecStore& store,
                                         const std::string& a,
                                         const std::string& b,
                                         const std::string& c,
                                         const AnalogyMethod& method);

// Accuracy over answered questions; components hold per-section accuracies,
// the semantic/syntactic rollups for sectioned data, and accuracy over all.
EvalScore eval_analogy(const VecStore& store, const AnalogyDataset& ds,
                       const AnalogyMethod& method);

struct KMeansResult {
  std::vector<int> assignment;  // cluster id per point
  double wcss;                  // within-cluster sum of squared distances
  Eigen::MatrixXd centroids;    // k x dim
};

// Lloyd's algorithm with k-means++ seeding, `restarts` independent runs
// (best WCSS wins), empty clusters re-seeded with the farthest point,
// convergence on stable assignments, iteration cap 300.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k,
                    std::uint64_t seed, std::size_t restarts);

// (1/N) sum over clusters of the majority gold-category count.
double purity(const std::vector<int>& assignment,
              const std::vector<std::string>& gold_categories);

// k-means over the usable word vectors (unit-normalized) with k = number of
// gold categories that kept at least one usable word; primary = purity.
EvalScore eval_categorization(const VecStore& store,
                              const CategorizationDataset& ds,
                              std::uint64_t seed = 42,
                              std::size_t restarts = 10);

// Average pairwise similarity of the group with member `leave_out` removed:
// with |W| = n+1, (1/(n(n-1))) * sum over ordered pairs of the rest.
double compactness(const Eigen::MatrixXd& sim, std::size_t leave_out);

struct OutlierResult {
  std::string predicted;         // word whose removal leaves the most compact rest
  std::size_t outlier_position;  // OP: rank of the true outlier, 0..n
};

// Words sorted by compactness ascending; OP is the true outlier's position
// (n = fully detected). Ties order the true outlier first (pessimistic),
// then lexicographically.
OutlierResult detect_outlier(const VecStore& store, const OutlierGroup& group);

// primary = fraction of groups with OP = n; components carry OPP = mean OP/n.
EvalScore eval_outlier(const VecStore& store, const OutlierDataset& ds);

// Sum over embedding columns of the best Pearson correlation against any
// linguistic property column, computed over the shared vocabulary. Columns
// with zero variance contribute 0. Negative best correlations are kept
// unless clamp_negative is set.
EvalScore qvec(const VecStore& store, const LinguisticMatrix& ling,
               bool clamp_negative = false);

}  // namespace wordeval
