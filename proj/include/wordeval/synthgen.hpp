#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "wordeval/datasets.hpp"
#include "wordeval/vecstore.hpp"

namespace wordeval {

// Planted structures. Each generator checks its own certificate before
// returning, so a fixture that comes back is guaranteed to carry the
// property its tests rely on.

// Unit vectors with no planted structure; no gold data.
struct RandomVectors {};

// Disjoint word pairs whose gold scores are a strictly increasing function
// of the true cosines, so rank correlation is exactly 1.
struct SimilarityMonotone {
  std::size_t pairs = 50;
};

// Axis-aligned relation offsets over per-question orthogonal base axes:
// d = c + (b - a) holds bit-exactly and every non-answer candidate stays at
// cosine <= 0.5 from the target. Needs dim >= relations + 2*questions +
// distractors.
struct AnalogyOffsets {
  std::size_t relations = 5;
  std::size_t questions = 500;
};

// k tight clusters on orthogonal axes with inter-centroid distance at least
// `separation` times the largest intra-cluster radius.
struct Blobs {
  std::size_t k = 3;
  double separation = 10.0;
};

// Groups of near-duplicate members plus one orthogonal outlier whose mean
// cosine to the members sits below every member's by at least 0.2.
struct OutlierGroups {
  std::size_t groups = 10;
  std::size_t group_size = 8;
};

// Token tag = sign of a fixed linear functional of the token's embedding,
// with every token kept clear of the decision boundary.
struct SeparableTagging {
  std::size_t sentences = 100;
};

using PlantedStructure =
    std::variant<RandomVectors, SimilarityMonotone, AnalogyOffsets, Blobs,
                 OutlierGroups, SeparableTagging>;

struct PlantedSpec {
  std::uint64_t seed = 0;
  std::size_t vocab_size = 100;
  Eigen::Index dim = 50;
  PlantedStructure structure = RandomVectors{};
};

using GoldData = std::variant<std::monostate, SimilarityDataset, AnalogyDataset,
                              CategorizationDataset, OutlierDataset,
                              SequenceCorpus>;

struct GeneratedFixture {
  VecStore store;
  GoldData gold;
};

// Deterministic in spec.seed; throws ErrorKind::Invalid for infeasible
// specs or a violated certificate.
GeneratedFixture generate(const PlantedSpec& spec);

// Serializes store + gold in the formats the loaders and parsers read and
// returns the file names written (relative to out_dir).
std::vector<std::string> write_fixture(const GeneratedFixture& fixture,
                                       const std::string& out_dir);

}  // namespace wordeval
