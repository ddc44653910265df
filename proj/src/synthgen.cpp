#include "wordeval/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "wordeval/prng.hpp"

namespace wordeval {

namespace {

Eigen::VectorXd random_unit(Prng& rng, Eigen::Index dim) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

std::string numbered(const char* prefix, std::size_t i) {
  return std::string(prefix) + std::to_string(i);
}

void certify(bool ok, const std::string& what) {
  if (!ok) {
    throw Error(ErrorKind::Invalid, "fixture certificate violated: " + what);
  }
}

GeneratedFixture gen_random(const PlantedSpec& spec, Prng& rng) {
  std::vector<std::string> vocab(spec.vocab_size);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(spec.vocab_size), spec.dim);
  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    vocab[i] = numbered("w", i);
    matrix.row(static_cast<Eigen::Index>(i)) = random_unit(rng, spec.dim).transpose();
  }
  return {VecStore(std::move(vocab), std::move(matrix)), std::monostate{}};
}

GeneratedFixture gen_similarity(const PlantedSpec& spec,
                                const SimilarityMonotone& cfg, Prng& rng) {
  if (cfg.pairs < 2) {
    throw Error(ErrorKind::Invalid, "similarity-monotone needs >= 2 pairs");
  }
  if (spec.vocab_size < 2 * cfg.pairs) {
    throw Error(ErrorKind::Invalid,
                "similarity-monotone needs vocab_size >= 2 * pairs");
  }
  std::vector<std::string> vocab(spec.vocab_size);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(spec.vocab_size), spec.dim);
  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    vocab[i] = numbered("w", i);
    matrix.row(static_cast<Eigen::Index>(i)) = random_unit(rng, spec.dim).transpose();
  }

  // Pair i = (w2i, w2i+1). Redraw the second word of a pair until all pair
  // cosines are pairwise distinct, then rank them to get monotone golds.
  std::vector<double> cosines(cfg.pairs);
  auto pair_cosine = [&](std::size_t p) {
    return matrix.row(static_cast<Eigen::Index>(2 * p))
        .dot(matrix.row(static_cast<Eigen::Index>(2 * p + 1)));
  };
  for (std::size_t p = 0; p < cfg.pairs; ++p) cosines[p] = pair_cosine(p);
  for (std::size_t p = 0; p < cfg.pairs; ++p) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      bool clash = false;
      for (std::size_t q = 0; q < cfg.pairs && !clash; ++q) {
        clash = q != p && std::abs(cosines[q] - cosines[p]) < 1e-9;
      }
      if (!clash) break;
      matrix.row(static_cast<Eigen::Index>(2 * p + 1)) =
          random_unit(rng, spec.dim).transpose();
      cosines[p] = pair_cosine(p);
    }
  }

  std::vector<std::size_t> order(cfg.pairs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cosines[a] < cosines[b]; });
  std::vector<double> gold(cfg.pairs);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    gold[order[rank]] = static_cast<double>(rank + 1);
  }

  SimilarityDataset ds;
  ds.name = "planted-similarity";
  for (std::size_t p = 0; p < cfg.pairs; ++p) {
    ds.pairs.push_back({vocab[2 * p], vocab[2 * p + 1], gold[p]});
  }

  // Certificate: gold strictly increases with the true cosine.
  for (std::size_t r = 1; r < order.size(); ++r) {
    certify(cosines[order[r]] > cosines[order[r - 1]] &&
                gold[order[r]] > gold[order[r - 1]],
            "gold scores not strictly monotone in cosine");
  }
  return {VecStore(std::move(vocab), std::move(matrix)), std::move(ds)};
}

GeneratedFixture gen_analogy(const PlantedSpec& spec, const AnalogyOffsets& cfg,
                             Prng&) {
  // Fully deterministic: axes are laid out in order, no random draws needed.
  if (cfg.relations == 0 || cfg.questions == 0) {
    throw Error(ErrorKind::Invalid, "analogy-offsets needs relations and questions");
  }
  if (spec.vocab_size < 4 * cfg.questions) {
    throw Error(ErrorKind::Invalid,
                "analogy-offsets needs vocab_size >= 4 * questions");
  }
  const std::size_t distractors = spec.vocab_size - 4 * cfg.questions;
  const std::size_t axes_needed = cfg.relations + 2 * cfg.questions + distractors;
  if (spec.dim < static_cast<Eigen::Index>(axes_needed)) {
    throw Error(ErrorKind::Invalid,
                "analogy-offsets needs dim >= relations + 2*questions + "
                "distractors (" +
                    std::to_string(axes_needed) + ")");
  }

  const double base_scale = 3.0;
  const double offset_scale = 2.0;
  std::vector<std::string> vocab;
  vocab.reserve(spec.vocab_size);
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(spec.vocab_size), spec.dim);

  AnalogyDataset ds;
  ds.name = "planted-analogy";
  for (std::size_t r = 0; r < cfg.relations; ++r) {
    ds.sections.push_back({numbered("relation", r), {}});
  }

  std::size_t row = 0;
  Eigen::Index next_axis = static_cast<Eigen::Index>(cfg.relations);
  for (std::size_t q = 0; q < cfg.questions; ++q) {
    const std::size_t rel = q % cfg.relations;
    const Eigen::Index axis_u = next_axis++;
    const Eigen::Index axis_v = next_axis++;
    const Eigen::Index axis_rel = static_cast<Eigen::Index>(rel);

    auto add_word = [&](const std::string& word, Eigen::Index base_axis,
                        bool with_offset) {
      vocab.push_back(word);
      matrix(static_cast<Eigen::Index>(row), base_axis) = base_scale;
      if (with_offset) {
        matrix(static_cast<Eigen::Index>(row), axis_rel) = offset_scale;
      }
      ++row;
    };
    AnalogyQuestion question{numbered("a", q), numbered("b", q),
                             numbered("c", q), numbered("d", q)};
    add_word(question.a, axis_u, false);
    add_word(question.b, axis_u, true);
    add_word(question.c, axis_v, false);
    add_word(question.d, axis_v, true);
    ds.sections[rel].questions.push_back(question);
  }
  for (std::size_t x = 0; x < distractors; ++x) {
    vocab.push_back(numbered("x", x));
    matrix(static_cast<Eigen::Index>(row), next_axis++) = base_scale;
    ++row;
  }

  VecStore store(std::move(vocab), std::move(matrix));

  // Certificate: exact offsets and every non-answer word at cosine <= 0.5
  // from each question's target vector.
  std::size_t word_row = 0;
  for (std::size_t q = 0; q < cfg.questions; ++q) {
    Eigen::VectorXd va = store.row(word_row).transpose();
    Eigen::VectorXd vb = store.row(word_row + 1).transpose();
    Eigen::VectorXd vc = store.row(word_row + 2).transpose();
    Eigen::VectorXd vd = store.row(word_row + 3).transpose();
    Eigen::VectorXd target = vb - va + vc;
    certify((target.array() == vd.array()).all(),
            "offset identity d = c + (b - a) not exact");
    Eigen::VectorXd dots = store.matrix() * target;
    double tnorm = target.norm();
    for (std::size_t w = 0; w < store.size(); ++w) {
      if (w >= word_row && w < word_row + 4) continue;
      double c = dots(static_cast<Eigen::Index>(w)) / (store.row_norm(w) * tnorm);
      certify(c <= 0.5 + 1e-12, "distractor too close to analogy target");
    }
    word_row += 4;
  }
  return {std::move(store), std::move(ds)};
}

GeneratedFixture gen_blobs(const PlantedSpec& spec, const Blobs& cfg, Prng& rng) {
  if (cfg.k < 2 || cfg.separation <= 0.0) {
    throw Error(ErrorKind::Invalid, "blobs needs k >= 2 and separation > 0");
  }
  if (static_cast<Eigen::Index>(cfg.k) > spec.dim || cfg.k > spec.vocab_size) {
    throw Error(ErrorKind::Invalid, "blobs needs k <= dim and k <= vocab_size");
  }
  const double noise =
      std::sqrt(2.0) / (2.0 * cfg.separation * std::sqrt(static_cast<double>(spec.dim)));

  std::vector<std::string> vocab(spec.vocab_size);
  std::vector<std::size_t> cluster_of(spec.vocab_size);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(spec.vocab_size), spec.dim);
  CategorizationDataset ds;
  ds.name = "planted-blobs";
  for (std::size_t g = 0; g < cfg.k; ++g) ds.categories.push_back(numbered("cat", g));

  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    std::size_t g = i % cfg.k;
    cluster_of[i] = g;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.dim);
    v(static_cast<Eigen::Index>(g)) = 1.0;
    for (Eigen::Index d = 0; d < spec.dim; ++d) v(d) += noise * rng.normal();
    v /= v.norm();
    vocab[i] = numbered("w", i);
    matrix.row(static_cast<Eigen::Index>(i)) = v.transpose();
    ds.entries.push_back({vocab[i], ds.categories[g]});
  }

  // Certificate: min inter-centroid distance >= separation * max radius.
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.k),
                                                    spec.dim);
  std::vector<double> counts(cfg.k, 0.0);
  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    centroids.row(static_cast<Eigen::Index>(cluster_of[i])) +=
        matrix.row(static_cast<Eigen::Index>(i));
    counts[cluster_of[i]] += 1.0;
  }
  for (std::size_t g = 0; g < cfg.k; ++g) {
    certify(counts[g] > 0.0, "empty planted blob");
    centroids.row(static_cast<Eigen::Index>(g)) /= counts[g];
  }
  double max_radius = 0.0;
  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    max_radius = std::max(
        max_radius, (matrix.row(static_cast<Eigen::Index>(i)) -
                     centroids.row(static_cast<Eigen::Index>(cluster_of[i])))
                        .norm());
  }
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < cfg.k; ++g) {
    for (std::size_t h = g + 1; h < cfg.k; ++h) {
      min_gap = std::min(min_gap, (centroids.row(static_cast<Eigen::Index>(g)) -
                                   centroids.row(static_cast<Eigen::Index>(h)))
                                      .norm());
    }
  }
  certify(min_gap >= cfg.separation * max_radius,
          "blob separation below requested factor");
  return {VecStore(std::move(vocab), std::move(matrix)), std::move(ds)};
}

GeneratedFixture gen_outliers(const PlantedSpec& spec, const OutlierGroups& cfg,
                              Prng& rng) {
  if (cfg.groups == 0 || cfg.group_size < 3) {
    throw Error(ErrorKind::Invalid, "outlier-groups needs groups and size >= 3");
  }
  if (spec.vocab_size < cfg.groups * cfg.group_size) {
    throw Error(ErrorKind::Invalid,
                "outlier-groups needs vocab_size >= groups * group_size");
  }
  if (spec.dim < static_cast<Eigen::Index>(2 * cfg.groups)) {
    throw Error(ErrorKind::Invalid, "outlier-groups needs dim >= 2 * groups");
  }
  const double noise = 0.05 / std::sqrt(static_cast<double>(spec.dim));
  const double margin = 0.2;

  std::vector<std::string> vocab;
  vocab.reserve(spec.vocab_size);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(spec.vocab_size), spec.dim);
  OutlierDataset ds;
  ds.name = "planted-outliers";

  std::size_t row = 0;
  auto noisy_axis = [&](Eigen::Index axis) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.dim);
    v(axis) = 1.0;
    for (Eigen::Index d = 0; d < spec.dim; ++d) v(d) += noise * rng.normal();
    return Eigen::VectorXd(v / v.norm());
  };
  for (std::size_t g = 0; g < cfg.groups; ++g) {
    OutlierGroup group;
    const Eigen::Index member_axis = static_cast<Eigen::Index>(2 * g);
    const Eigen::Index outlier_axis = static_cast<Eigen::Index>(2 * g + 1);
    for (std::size_t i = 0; i + 1 < cfg.group_size; ++i) {
      std::string word = "g" + std::to_string(g) + "w" + std::to_string(i);
      vocab.push_back(word);
      matrix.row(static_cast<Eigen::Index>(row++)) = noisy_axis(member_axis).transpose();
      group.words.push_back(word);
    }
    std::string outlier = "g" + std::to_string(g) + "out";
    vocab.push_back(outlier);
    matrix.row(static_cast<Eigen::Index>(row++)) = noisy_axis(outlier_axis).transpose();
    group.words.push_back(outlier);
    group.outlier_index = group.words.size() - 1;
    ds.groups.push_back(std::move(group));
  }
  for (; row < spec.vocab_size; ++row) {
    vocab.push_back(numbered("filler", row));
    matrix.row(static_cast<Eigen::Index>(row)) = random_unit(rng, spec.dim).transpose();
  }

  VecStore store(std::move(vocab), std::move(matrix));

  // Certificate: the outlier's mean cosine to the members is below every
  // member's mean cosine to the rest by at least the margin.
  for (const auto& group : ds.groups) {
    const std::size_t size = group.words.size();
    std::vector<std::size_t> rows;
    for (const auto& w : group.words) rows.push_back(*store.find(w));
    std::vector<double> row_mean(size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i == j) continue;
        row_mean[i] += cosine(store.row(rows[i]).transpose(),
                              store.row(rows[j]).transpose());
      }
      row_mean[i] /= static_cast<double>(size - 1);
    }
    for (std::size_t i = 0; i + 1 < size; ++i) {
      certify(row_mean[group.outlier_index] <= row_mean[i] - margin,
              "outlier not separated from members by the stated margin");
    }
  }
  return {std::move(store), std::move(ds)};
}

GeneratedFixture gen_tagging(const PlantedSpec& spec, const SeparableTagging& cfg,
                             Prng& rng) {
  if (cfg.sentences == 0) {
    throw Error(ErrorKind::Invalid, "separable-tagging needs sentences > 0");
  }
  if (spec.vocab_size < 2) {
    throw Error(ErrorKind::Invalid, "separable-tagging needs vocab_size >= 2");
  }
  const double margin = 0.5 / std::sqrt(static_cast<double>(spec.dim));
  Eigen::VectorXd functional = random_unit(rng, spec.dim);

  std::vector<std::string> vocab(spec.vocab_size);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(spec.vocab_size), spec.dim);
  std::vector<std::string> tag_of(spec.vocab_size);
  for (std::size_t i = 0; i < spec.vocab_size; ++i) {
    Eigen::VectorXd v;
    double score = 0.0;
    int attempts = 0;
    do {
      v = random_unit(rng, spec.dim);
      score = functional.dot(v);
      if (++attempts > 10000) {
        throw Error(ErrorKind::Invalid,
                    "separable-tagging could not place a token off the boundary");
      }
    } while (std::abs(score) < margin);
    vocab[i] = numbered("tok", i);
    matrix.row(static_cast<Eigen::Index>(i)) = v.transpose();
    tag_of[i] = score > 0.0 ? "POS" : "NEG";
  }

  SequenceCorpus corpus;
  corpus.name = "planted-tagging";
  corpus.tagset = {"NEG", "POS"};
  corpus.scheme = TagScheme::PerToken;
  for (std::size_t s = 0; s < cfg.sentences; ++s) {
    std::size_t length = 4 + static_cast<std::size_t>(rng.below(5));
    std::vector<std::string> tokens(length), tags(length);
    for (std::size_t t = 0; t < length; ++t) {
      std::size_t w = static_cast<std::size_t>(rng.below(spec.vocab_size));
      tokens[t] = vocab[w];
      tags[t] = tag_of[w];
    }
    corpus.sentences.push_back(std::move(tokens));
    corpus.labels.push_back(std::move(tags));
  }

  VecStore store(std::move(vocab), std::move(matrix));

  // Certificate: every token keeps a margin from the separating hyperplane
  // and its tag matches the functional's sign.
  for (std::size_t i = 0; i < store.size(); ++i) {
    double score = functional.dot(store.row(i).transpose());
    certify(std::abs(score) >= margin, "token sits on the decision boundary");
    certify((score > 0.0) == (tag_of[i] == "POS"), "tag does not match functional");
  }
  return {std::move(store), std::move(corpus)};
}

}  // namespace

GeneratedFixture generate(const PlantedSpec& spec) {
  if (spec.vocab_size == 0 || spec.dim <= 0) {
    throw Error(ErrorKind::Invalid, "planted spec needs vocab_size and dim > 0");
  }
  Prng rng(spec.seed);
  return std::visit(
      [&](const auto& cfg) -> GeneratedFixture {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, RandomVectors>) {
          return gen_random(spec, rng);
        } else if constexpr (std::is_same_v<T, SimilarityMonotone>) {
          return gen_similarity(spec, cfg, rng);
        } else if constexpr (std::is_same_v<T, AnalogyOffsets>) {
          return gen_analogy(spec, cfg, rng);
        } else if constexpr (std::is_same_v<T, Blobs>) {
          return gen_blobs(spec, cfg, rng);
        } else if constexpr (std::is_same_v<T, OutlierGroups>) {
          return gen_outliers(spec, cfg, rng);
        } else {
          return gen_tagging(spec, cfg, rng);
        }
      },
      spec.structure);
}

std::vector<std::string> write_fixture(const GeneratedFixture& fixture,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write " + (fs::path(out_dir) / name).string());
    }
    written.push_back(name);
    return out;
  };

  {
    auto out = open("vectors.txt");
    fixture.store.save_text(out, true);
  }
  std::visit(
      [&](const auto& gold) {
        using T = std::decay_t<decltype(gold)>;
        if constexpr (std::is_same_v<T, SimilarityDataset>) {
          auto out = open("gold-similarity.txt");
          write_similarity(gold, out);
        } else if constexpr (std::is_same_v<T, AnalogyDataset>) {
          auto out = open("gold-analogy.txt");
          write_analogy(gold, AnalogyFormat::Google, out);
        } else if constexpr (std::is_same_v<T, CategorizationDataset>) {
          auto out = open("gold-categories.tsv");
          write_categorization(gold, out);
        } else if constexpr (std::is_same_v<T, OutlierDataset>) {
          auto out = open("gold-outliers.txt");
          write_outliers(gold, out);
        } else if constexpr (std::is_same_v<T, SequenceCorpus>) {
          auto out = open("gold-tags.conll");
          write_conll(gold, out);
        }
      },
      fixture.gold);
  return written;
}

}  // namespace wordeval
