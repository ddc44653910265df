#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wordeval/intrinsic.hpp"
#include "wordeval/synthgen.hpp"

using namespace wordeval;

namespace {

std::string serialize(const GeneratedFixture& fx) {
  std::ostringstream out;
  fx.store.save_text(out, true);
  std::visit(
      [&](const auto& gold) {
        using T = std::decay_t<decltype(gold)>;
        if constexpr (std::is_same_v<T, SimilarityDataset>) {
          write_similarity(gold, out);
        } else if constexpr (std::is_same_v<T, AnalogyDataset>) {
          write_analogy(gold, AnalogyFormat::Google, out);
        } else if constexpr (std::is_same_v<T, CategorizationDataset>) {
          write_categorization(gold, out);
        } else if constexpr (std::is_same_v<T, OutlierDataset>) {
          write_outliers(gold, out);
        } else if constexpr (std::is_same_v<T, SequenceCorpus>) {
          write_conll(gold, out);
        }
      },
      fx.gold);
  return out.str();
}

}  // namespace

TEST_CASE("same seed means byte-identical fixtures") {
  std::vector<PlantedSpec> specs = {
      {9, 50, 12, RandomVectors{}},
      {9, 40, 12, SimilarityMonotone{15}},
      {9, 22, 13, AnalogyOffsets{2, 5}},
      {9, 30, 12, Blobs{3, 10.0}},
      {9, 24, 12, OutlierGroups{3, 8}},
      {9, 30, 12, SeparableTagging{20}},
  };
  for (const auto& spec : specs) {
    CHECK(serialize(generate(spec)) == serialize(generate(spec)));
  }
  // A different seed must change the random structures.
  PlantedSpec other{10, 50, 12, RandomVectors{}};
  CHECK(serialize(generate(other)) !=
        serialize(generate({9, 50, 12, RandomVectors{}})));
}

TEST_CASE("similarity-monotone certificate: golds follow cosines") {
  GeneratedFixture fx = generate({4, 60, 10, SimilarityMonotone{25}});
  const auto& ds = std::get<SimilarityDataset>(fx.gold);
  REQUIRE(ds.pairs.size() == 25);
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    for (std::size_t j = 0; j < ds.pairs.size(); ++j) {
      double ci = cosine(fx.store.row(*fx.store.find(ds.pairs[i].word1)).transpose(),
                         fx.store.row(*fx.store.find(ds.pairs[i].word2)).transpose());
      double cj = cosine(fx.store.row(*fx.store.find(ds.pairs[j].word1)).transpose(),
                         fx.store.row(*fx.store.find(ds.pairs[j].word2)).transpose());
      if (ds.pairs[i].gold < ds.pairs[j].gold) CHECK(ci < cj);
    }
  }
}

TEST_CASE("analogy-offsets certificate: exact offsets, bounded distractors") {
  GeneratedFixture fx = generate({1, 30, 20, AnalogyOffsets{3, 6}});
  const auto& ds = std::get<AnalogyDataset>(fx.gold);
  CHECK(ds.question_count() == 6);
  CHECK(ds.sections.size() == 3);
  for (const auto& section : ds.sections) {
    for (const auto& q : section.questions) {
      Eigen::VectorXd va = fx.store.row(*fx.store.find(q.a)).transpose();
      Eigen::VectorXd vb = fx.store.row(*fx.store.find(q.b)).transpose();
      Eigen::VectorXd vc = fx.store.row(*fx.store.find(q.c)).transpose();
      Eigen::VectorXd vd = fx.store.row(*fx.store.find(q.d)).transpose();
      CHECK(((vb - va + vc).array() == vd.array()).all());
    }
  }
}

TEST_CASE("blobs certificate implies perfect clustering") {
  GeneratedFixture fx = generate({2, 45, 10, Blobs{3, 10.0}});
  const auto& ds = std::get<CategorizationDataset>(fx.gold);
  CHECK(eval_categorization(fx.store, ds).primary == 1.0);
}

TEST_CASE("outlier-groups certificate implies detection") {
  GeneratedFixture fx = generate({3, 32, 10, OutlierGroups{4, 8}});
  const auto& ds = std::get<OutlierDataset>(fx.gold);
  for (const auto& group : ds.groups) {
    OutlierResult r = detect_outlier(fx.store, group);
    CHECK(r.outlier_position == group.words.size() - 1);
  }
}

TEST_CASE("separable-tagging tags follow a linear functional") {
  GeneratedFixture fx = generate({6, 30, 10, SeparableTagging{15}});
  const auto& corpus = std::get<SequenceCorpus>(fx.gold);
  CHECK(corpus.tagset == std::vector<std::string>{"NEG", "POS"});
  CHECK(corpus.sentences.size() == 15);
  // Token tags are consistent: a token always carries the same tag.
  std::map<std::string, std::string> seen;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    for (std::size_t t = 0; t < corpus.sentences[s].size(); ++t) {
      auto [it, inserted] =
          seen.emplace(corpus.sentences[s][t], corpus.labels[s][t]);
      if (!inserted) CHECK(it->second == corpus.labels[s][t]);
    }
  }
}

TEST_CASE("infeasible specs are rejected") {
  CHECK_THROWS_AS(generate({0, 10, 4, Blobs{20, 10.0}}), Error);
  CHECK_THROWS_AS(generate({0, 10, 2, AnalogyOffsets{2, 2}}), Error);
  CHECK_THROWS_AS(generate({0, 3, 4, SimilarityMonotone{5}}), Error);
  CHECK_THROWS_AS(generate({0, 10, 4, OutlierGroups{5, 8}}), Error);
  CHECK_THROWS_AS(generate({0, 0, 4, RandomVectors{}}), Error);
}

TEST_CASE("write_fixture emits loadable files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "wordeval_synth_test";
  fs::remove_all(dir);
  GeneratedFixture fx = generate({12, 40, 10, SimilarityMonotone{12}});
  auto files = write_fixture(fx, dir.string());
  REQUIRE(files.size() == 2);
  std::ifstream vec(dir / "vectors.txt");
  VecStore store = VecStore::load_text(vec, TextHeader::Present);
  CHECK(store.size() == 40);
  std::ifstream gold(dir / "gold-similarity.txt");
  auto ds = parse_similarity(gold, "g");
  CHECK(ds.pairs.size() == 12);
  CHECK(eval_similarity(store, ds).primary == 1.0);
  fs::remove_all(dir);
}
