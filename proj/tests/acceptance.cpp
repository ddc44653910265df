// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check pins its tolerance in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wordeval/analysis.hpp"
#include "wordeval/datasets.hpp"
#include "wordeval/extrinsic.hpp"
#include "wordeval/intrinsic.hpp"
#include "wordeval/prng.hpp"
#include "wordeval/runner.hpp"
#include "wordeval/synthgen.hpp"

using namespace wordeval;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int number, const char* name, const std::function<void()>& body) {
  std::string detail;
  bool ok = true;
  try {
    body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name,
              detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

double test_cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return u.dot(v) / (u.norm() * v.norm());
}

// Independent full-vocabulary argmax used against solve_analogy.
std::string naive_analogy(const VecStore& store, std::size_t ia, std::size_t ib,
                          std::size_t ic, bool multiplicative) {
  Eigen::VectorXd va = store.row(ia).transpose();
  Eigen::VectorXd vb = store.row(ib).transpose();
  Eigen::VectorXd vc = store.row(ic).transpose();
  double best = -1e300;
  std::size_t arg = store.size();
  for (std::size_t w = 0; w < store.size(); ++w) {
    if (w == ia || w == ib || w == ic || !store.usable(w)) continue;
    Eigen::VectorXd vw = store.row(w).transpose();
    double score;
    if (!multiplicative) {
      score = test_cosine(vw, vb - va + vc);
    } else {
      double sa = (test_cosine(vw, va) + 1.0) / 2.0;
      double sb = (test_cosine(vw, vb) + 1.0) / 2.0;
      double sc = (test_cosine(vw, vc) + 1.0) / 2.0;
      score = sc * sb / (sa + 0.001);
    }
    if (score > best) {
      best = score;
      arg = w;
    }
  }
  return store.word(arg);
}

void criterion_1_analogy_oracle() {
  auto start = std::chrono::steady_clock::now();
  GeneratedFixture fx = generate({2024, 10000, 50, RandomVectors{}});
  const VecStore& store = fx.store;
  Prng rng(55);
  std::size_t checked = 0;
  while (checked < 200) {
    std::size_t ia = rng.below(store.size());
    std::size_t ib = rng.below(store.size());
    std::size_t ic = rng.below(store.size());
    if (ia == ib || ia == ic || ib == ic) continue;
    ++checked;
    for (bool multiplicative : {false, true}) {
      AnalogyMethod method{multiplicative ? AnalogyMethod::CosMul
                                          : AnalogyMethod::CosAdd,
                           0.001};
      auto got = solve_analogy(store, store.word(ia), store.word(ib),
                               store.word(ic), method);
      require(got.has_value(), "question unexpectedly unanswerable");
      std::string expected = naive_analogy(store, ia, ib, ic, multiplicative);
      require(*got == expected, "method disagrees with the naive scan on '" +
                                    store.word(ia) + "'");
    }
  }
  double seconds = elapsed_seconds(start);
  require(seconds < 10.0,
          "took " + std::to_string(seconds) + " s, budget is 10 s");
}

void criterion_2_similarity_planted() {
  GeneratedFixture fx = generate({31, 200, 50, SimilarityMonotone{100}});
  SimilarityDataset ds = std::get<SimilarityDataset>(fx.gold);
  EvalScore score = eval_similarity(fx.store, ds);
  require(score.primary == 1.0, "Spearman != 1.0 exactly on monotone fixture");
  for (auto& pair : ds.pairs) pair.gold = -pair.gold;
  require(eval_similarity(fx.store, ds).primary == -1.0,
          "Spearman != -1.0 exactly on reversed gold");
}

void criterion_3_analogy_planted() {
  PlantedSpec spec;
  spec.seed = 8;
  spec.vocab_size = 2010;  // 4*500 planted words + 10 distractors
  spec.dim = 5 + 2 * 500 + 10;
  spec.structure = AnalogyOffsets{5, 500};
  GeneratedFixture fx = generate(spec);
  AnalogyDataset ds = std::get<AnalogyDataset>(fx.gold);
  require(ds.question_count() == 500, "fixture must hold 500 questions");

  EvalScore add = eval_analogy(fx.store, ds, {AnalogyMethod::CosAdd, 0.001});
  require(add.primary == 1.0, "3CosAdd accuracy != 100%");
  EvalScore mul = eval_analogy(fx.store, ds, {AnalogyMethod::CosMul, 0.001});
  require(mul.primary == 1.0, "3CosMul accuracy != 100%");

  // Corrupt the gold answer of every 10th question with a distractor word.
  std::size_t q = 0, corrupted = 0;
  for (auto& section : ds.sections) {
    for (auto& question : section.questions) {
      if (q % 10 == 0) {
        question.d = "x" + std::to_string(corrupted % 10);
        ++corrupted;
      }
      ++q;
    }
  }
  require(corrupted == 50, "corruption count drifted");
  EvalScore damaged = eval_analogy(fx.store, ds, {AnalogyMethod::CosAdd, 0.001});
  require(damaged.primary == 0.9, "accuracy after 10% corruption != 90%");
}

void criterion_4_outlier_identity() {
  Prng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::MatrixXd sim(8, 8);
    for (int i = 0; i < 8; ++i) {
      sim(i, i) = 1.0;
      for (int j = i + 1; j < 8; ++j) {
        double v = rng.uniform(-1, 1);
        sim(i, j) = v;
        sim(j, i) = v;
      }
    }
    std::size_t argmax_c = 0, argmin_row = 0;
    double best_c = -1e300, best_row = 1e300;
    for (std::size_t w = 0; w < 8; ++w) {
      double c = compactness(sim, w);
      if (c > best_c) {
        best_c = c;
        argmax_c = w;
      }
      double row = 0.0;
      for (std::size_t u = 0; u < 8; ++u) {
        if (u != w) {
          row += sim(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(u));
        }
      }
      if (row < best_row) {
        best_row = row;
        argmin_row = w;
      }
    }
    require(argmax_c == argmin_row,
            "compactness argmax disagrees with row-sum argmin");
  }

  // Hand-tallied fixture: 7 detectable groups and 3 adversarial groups in
  // disjoint dimension blocks. Expected accuracy 7/10, OPP mean 0.7.
  std::vector<std::string> vocab;
  std::vector<Eigen::VectorXd> rows;
  OutlierDataset ds;
  ds.name = "tally";
  const Eigen::Index dim = 7 * 9 + 3 * 7;
  Eigen::Index base = 0;
  for (int g = 0; g < 7; ++g) {
    OutlierGroup group;
    for (int i = 0; i < 7; ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      v(base) = 1.0;
      v(base + 1 + i) = 0.01;
      std::string word = "det" + std::to_string(g) + "w" + std::to_string(i);
      vocab.push_back(word);
      rows.push_back(v);
      group.words.push_back(word);
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    out(base + 8) = 1.0;
    std::string word = "det" + std::to_string(g) + "out";
    vocab.push_back(word);
    rows.push_back(out);
    group.words.push_back(word);
    group.outlier_index = 7;
    ds.groups.push_back(group);
    base += 9;
  }
  for (int g = 0; g < 3; ++g) {
    OutlierGroup group;
    Eigen::VectorXd hub = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < 7; ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      v(base + i) = 1.0;
      hub(base + i) = 1.0;
      std::string word = "adv" + std::to_string(g) + "w" + std::to_string(i);
      vocab.push_back(word);
      rows.push_back(v);
      group.words.push_back(word);
    }
    std::string word = "adv" + std::to_string(g) + "hub";
    vocab.push_back(word);
    rows.push_back(hub / hub.norm());
    group.words.push_back(word);
    group.outlier_index = 7;
    ds.groups.push_back(group);
    base += 7;
  }
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    matrix.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  VecStore store(vocab, matrix);

  for (std::size_t g = 0; g < ds.groups.size(); ++g) {
    OutlierResult r = detect_outlier(store, ds.groups[g]);
    require(r.outlier_position == (g < 7 ? 7u : 0u),
            "group " + std::to_string(g) + " has unexpected OP");
  }
  EvalScore score = eval_outlier(store, ds);
  require(score.primary == 0.7, "accuracy != hand tally 7/10");
  require(score.components.at("opp") == 0.7, "OPP != hand tally 0.7");
}

void criterion_5_clustering() {
  GeneratedFixture fx = generate({5, 300, 50, Blobs{3, 10.0}});
  EvalScore score = eval_categorization(
      fx.store, std::get<CategorizationDataset>(fx.gold), 42, 10);
  require(score.primary == 1.0, "blob purity != 1.0");

  Prng rng(91);
  for (int set = 0; set < 10; ++set) {
    int n = 8 + set % 5;
    Eigen::MatrixXd points(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) points(i, d) = rng.uniform(-2, 2);
    }
    KMeansResult result = kmeans(points, 2, 42 + set, 10);

    // Exhaustive oracle over all 2-partitions (point 0 fixed on side 0).
    double best = 1e300;
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
      Eigen::Vector3d sum0 = Eigen::Vector3d::Zero();
      Eigen::Vector3d sum1 = Eigen::Vector3d::Zero();
      int n0 = 0, n1 = 0;
      for (int i = 0; i < n; ++i) {
        bool side = i > 0 && ((mask >> (i - 1)) & 1u);
        (side ? sum1 : sum0) += points.row(i).transpose();
        ++(side ? n1 : n0);
      }
      if (n0 == 0 || n1 == 0) continue;
      Eigen::Vector3d c0 = sum0 / n0;
      Eigen::Vector3d c1 = sum1 / n1;
      double wcss = 0.0;
      for (int i = 0; i < n; ++i) {
        bool side = i > 0 && ((mask >> (i - 1)) & 1u);
        wcss += (points.row(i).transpose() - (side ? c1 : c0)).squaredNorm();
      }
      best = std::min(best, wcss);
    }
    require(std::abs(result.wcss - best) <= 1e-9,
            "k-means missed the exhaustive optimum on set " + std::to_string(set));
  }
}

void criterion_6_qvec() {
  Prng rng(66);
  std::vector<std::string> vocab;
  Eigen::MatrixXd values(30, 10);
  for (int i = 0; i < 30; ++i) {
    vocab.push_back("w" + std::to_string(i));
    for (int j = 0; j < 10; ++j) values(i, j) = rng.normal();
  }
  VecStore store(vocab, values);
  LinguisticMatrix self;
  self.name = "self";
  self.vocab = vocab;
  for (int j = 0; j < 10; ++j) self.props.push_back("p" + std::to_string(j));
  self.values = values;
  EvalScore identity = qvec(store, self);
  require(std::abs(identity.primary - 10.0) <= 1e-9, "qvec(X, X) != dim");

  LinguisticMatrix permuted = self;
  std::vector<Eigen::Index> perm = {9, 3, 0, 7, 5, 1, 8, 2, 6, 4};
  for (std::size_t j = 0; j < perm.size(); ++j) {
    permuted.props[j] = self.props[static_cast<std::size_t>(perm[j])];
    permuted.values.col(static_cast<Eigen::Index>(j)) = self.values.col(perm[j]);
  }
  require(std::abs(qvec(store, permuted).primary - identity.primary) <= 1e-12,
          "qvec changed under column permutation");

  VecStore tiny(std::vector<std::string>{"u", "v", "w"},
                (Eigen::MatrixXd(3, 2) << 0.2, 1.4, -0.7, 0.3, 1.1, -0.2)
                    .finished());
  LinguisticMatrix ling;
  ling.name = "tiny";
  ling.vocab = {"u", "v", "w"};
  ling.props = {"p0", "p1"};
  ling.values = (Eigen::MatrixXd(3, 2) << 0.5, -1.0, 0.25, 2.0, -0.75, 0.5)
                    .finished();
  auto corr = [](Eigen::VectorXd x, Eigen::VectorXd y) {
    double mx = x.mean(), my = y.mean();
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < x.size(); ++i) {
      sxy += (x(i) - mx) * (y(i) - my);
      sxx += (x(i) - mx) * (x(i) - mx);
      syy += (y(i) - my) * (y(i) - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };
  double expected = 0.0;
  for (int i = 0; i < 2; ++i) {
    double best = -2.0;
    for (int j = 0; j < 2; ++j) {
      best = std::max(best, corr(tiny.matrix().col(i), ling.values.col(j)));
    }
    expected += best;
  }
  require(std::abs(qvec(tiny, ling).primary - expected) <= 1e-12,
          "qvec disagrees with brute-force correlation enumeration");
}

void criterion_7_tagger() {
  // Gradient check on a 10-example batch.
  Prng rng(19);
  const Eigen::Index input = 20, hidden = 6, tags = 4, batch = 10;
  WindowTagger tagger;
  tagger.input_dim = input;
  tagger.tags = {"a", "b", "c", "d"};
  tagger.params.w1 = Eigen::MatrixXd(input, hidden);
  tagger.params.b1 = Eigen::VectorXd(hidden);
  tagger.params.w2 = Eigen::MatrixXd(hidden, tags);
  tagger.params.b2 = Eigen::VectorXd(tags);
  for (Eigen::Index i = 0; i < input; ++i) {
    for (Eigen::Index j = 0; j < hidden; ++j) {
      tagger.params.w1(i, j) = 0.4 * rng.normal();
    }
  }
  for (Eigen::Index i = 0; i < hidden; ++i) {
    tagger.params.b1(i) = 0.1 * rng.normal();
    for (Eigen::Index j = 0; j < tags; ++j) {
      tagger.params.w2(i, j) = 0.4 * rng.normal();
    }
  }
  for (Eigen::Index j = 0; j < tags; ++j) tagger.params.b2(j) = 0.1 * rng.normal();
  Eigen::MatrixXd features(batch, input);
  std::vector<int> gold(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    for (Eigen::Index j = 0; j < input; ++j) features(i, j) = rng.normal();
    gold[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(tags));
  }
  LossGrads lg = loss_and_gradients(tagger, features, gold);
  const double h = 1e-5;
  auto check_tensor = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& grad,
                          const char* name) {
    for (Eigen::Index i = 0; i < param.rows(); ++i) {
      for (Eigen::Index j = 0; j < param.cols(); ++j) {
        double saved = param(i, j);
        param(i, j) = saved + h;
        double up = loss_and_gradients(tagger, features, gold).loss;
        param(i, j) = saved - h;
        double down = loss_and_gradients(tagger, features, gold).loss;
        param(i, j) = saved;
        double numeric = (up - down) / (2 * h);
        double denom = std::max({std::abs(numeric), std::abs(grad(i, j)), 1e-8});
        require(std::abs(numeric - grad(i, j)) / denom < 1e-4,
                std::string("gradient mismatch in ") + name);
      }
    }
  };
  check_tensor(tagger.params.w1, lg.grads.w1, "w1");
  check_tensor(tagger.params.w2, lg.grads.w2, "w2");
  Eigen::MatrixXd b1m = tagger.params.b1;
  check_tensor(b1m, lg.grads.b1, "b1");
  tagger.params.b1 = b1m;
  Eigen::MatrixXd b2m = tagger.params.b2;
  check_tensor(b2m, lg.grads.b2, "b2");
  tagger.params.b2 = b2m;

  // Separable corpus at the reference settings: 2k sentences, D = 50,
  // 300 hidden units, 10 epochs, batch 50.
  auto start = std::chrono::steady_clock::now();
  PlantedSpec spec;
  spec.seed = 70;
  spec.vocab_size = 3000;
  spec.dim = 50;
  spec.structure = SeparableTagging{2000};
  GeneratedFixture fx = generate(spec);
  const auto& corpus = std::get<SequenceCorpus>(fx.gold);
  TaggerConfig config;
  config.seed = 7;
  TrainResult trained = train_tagger(fx.store, corpus, config);
  TagMetrics metrics =
      evaluate_tagging(trained.tagger, fx.store, corpus, TagScheme::PerToken);
  double seconds = elapsed_seconds(start);
  require(metrics.token_accuracy >= 0.99,
          "training accuracy " + std::to_string(metrics.token_accuracy) +
              " below 0.99");
  require(seconds < 60.0,
          "took " + std::to_string(seconds) + " s, budget is 60 s");
}

void criterion_8_statistics() {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  std::vector<double> x = {1, 2, 3};
  require(close(pearson(x, std::vector<double>{2, 4, 6}), 1.0), "pearson +1");
  require(close(pearson(x, std::vector<double>{6, 4, 2}), -1.0), "pearson -1");
  require(close(pearson(x, std::vector<double>{1, 3, 2}), 0.5), "pearson 0.5");
  require(close(spearman(x, std::vector<double>{10, 20, 30}), 1.0), "spearman +1");
  require(close(spearman(x, std::vector<double>{30, 20, 10}), -1.0), "spearman -1");

  Prng rng(88);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(10), b(10), at(10), bt(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    double ka = rng.uniform(0.01, 10.0);
    double kb = rng.uniform(0.01, 10.0);
    double ca = rng.uniform(-5, 5);
    double cb = rng.uniform(-5, 5);
    for (int i = 0; i < 10; ++i) {
      at[i] = ka * a[i] + ca;
      bt[i] = kb * b[i] + cb;
    }
    double r = pearson(a, b);
    require(std::abs(pearson(at, bt) - r) <= 1e-12, "affine invariance");
    for (int i = 0; i < 10; ++i) at[i] = -ka * a[i] + ca;
    require(std::abs(pearson(at, bt) + r) <= 1e-12, "sign flip under negation");
  }
}

void criterion_9_consistency_matrix() {
  Prng rng(16);
  std::vector<double> hidden(16), noise(16);
  for (int m = 0; m < 16; ++m) {
    hidden[static_cast<std::size_t>(m)] = rng.normal();
    noise[static_cast<std::size_t>(m)] = rng.normal();
  }
  // i_zero: noise orthogonalized against the centered hidden factor.
  double hm = 0.0, nm = 0.0;
  for (int m = 0; m < 16; ++m) {
    hm += hidden[static_cast<std::size_t>(m)] / 16.0;
    nm += noise[static_cast<std::size_t>(m)] / 16.0;
  }
  double dot = 0.0, hh = 0.0;
  for (int m = 0; m < 16; ++m) {
    dot += (noise[static_cast<std::size_t>(m)] - nm) *
           (hidden[static_cast<std::size_t>(m)] - hm);
    hh += (hidden[static_cast<std::size_t>(m)] - hm) *
          (hidden[static_cast<std::size_t>(m)] - hm);
  }

  ScoreTable table;
  MetricDesc i_pos{"i-pos", MetricKind::Intrinsic, Direction::HigherBetter};
  MetricDesc i_neg{"i-neg", MetricKind::Intrinsic, Direction::HigherBetter};
  MetricDesc i_zero{"i-zero", MetricKind::Intrinsic, Direction::HigherBetter};
  MetricDesc e_main{"e-main", MetricKind::Extrinsic, Direction::HigherBetter};
  MetricDesc e_other{"e-other", MetricKind::Extrinsic, Direction::HigherBetter};
  for (int m = 0; m < 16; ++m) {
    std::string name = "model" + std::to_string(m);
    double hv = hidden[static_cast<std::size_t>(m)];
    double zv = (noise[static_cast<std::size_t>(m)] - nm) - (dot / hh) * (hv - hm);
    table.set(name, i_pos, 10.0 * hv + 2.0);
    table.set(name, i_neg, -hv);
    table.set(name, i_zero, zv);
    table.set(name, e_main, hv);
    table.set(name, e_other, noise[static_cast<std::size_t>(m)] * 3.0 - 1.0);
  }

  CorrelationMatrix m = consistency_matrix(table);
  require(m.rows.size() == 3 && m.cols.size() == 2, "unexpected matrix shape");
  std::size_t main_col = m.cols[0] == "e-main" ? 0 : 1;
  require(std::abs(m.r[0][main_col] - 1.0) <= 1e-12, "planted +1 not recovered");
  require(std::abs(m.r[1][main_col] + 1.0) <= 1e-12, "planted -1 not recovered");
  require(std::abs(m.r[2][main_col]) <= 1e-12, "planted 0 not recovered");
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      require(m.n[i][j] == 16, "cell count != 16 models");
    }
  }

  // Lower-better flip on e-main negates exactly its column.
  ScoreTable flipped = table;
  for (auto& metric : flipped.metrics) {
    if (metric.name == "e-main") metric.direction = Direction::LowerBetter;
  }
  CorrelationMatrix f = consistency_matrix(flipped);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double expected = j == main_col ? -m.r[i][j] : m.r[i][j];
      require(std::abs(f.r[i][j] - expected) <= 1e-12,
              "sign flip did not negate exactly the flipped column");
    }
  }
}

void criterion_10_formats() {
  // Binary round-trips at sizes 1, 100, 10000.
  for (std::size_t words : {std::size_t{1}, std::size_t{100}, std::size_t{10000}}) {
    GeneratedFixture fx = generate({words, words, 50, RandomVectors{}});
    std::ostringstream sink;
    fx.store.save_binary(sink);
    std::istringstream in(sink.str());
    VecStore loaded = VecStore::load_binary(in);
    require(loaded.vocab() == fx.store.vocab(), "vocabulary drifted");
    for (Eigen::Index i = 0; i < loaded.matrix().rows(); ++i) {
      for (Eigen::Index d = 0; d < loaded.matrix().cols(); ++d) {
        float a = static_cast<float>(fx.store.matrix()(i, d));
        float b = static_cast<float>(loaded.matrix()(i, d));
        require(std::memcmp(&a, &b, sizeof(float)) == 0,
                "binary round-trip not bit-identical at size " +
                    std::to_string(words));
      }
    }
  }

  // Google-format fixture with the reference counts: 8,869 semantic and
  // 10,675 syntactic questions, 19,544 in total.
  const std::vector<std::pair<std::string, int>> sections = {
      {"capital-common-countries", 2000}, {"capital-world", 2000},
      {"currency", 2000},                 {"city-in-state", 2000},
      {"family", 869},                    {"gram1-adjective-to-adverb", 2000},
      {"gram2-opposite", 2000},           {"gram3-comparative", 2000},
      {"gram4-superlative", 2000},        {"gram5-present-participle", 2000},
      {"gram6-nationality-adjective", 675}};
  std::ostringstream file;
  for (const auto& [name, count] : sections) {
    file << ": " << name << '\n';
    for (int i = 0; i < count; ++i) {
      file << name[0] << i << "a " << name[0] << i << "b " << name[0] << i
           << "c " << name[0] << i << "d\n";
    }
  }
  std::istringstream in(file.str());
  AnalogyDataset ds = parse_analogy(in, AnalogyFormat::Google, "google");
  require(ds.question_count() == 19544, "total question count != 19544");
  require(ds.semantic_count() == 8869, "semantic count != 8869");
  require(ds.syntactic_count() == 10675, "syntactic count != 10675");
}

void criterion_11_determinism() {
  fs::path root = fs::temp_directory_path() / "wordeval_acceptance_run";
  fs::remove_all(root);
  fs::create_directories(root);

  GeneratedFixture sim = generate({301, 40, 10, SimilarityMonotone{12}});
  GeneratedFixture other = generate({302, 40, 10, RandomVectors{}});
  {
    std::ofstream v1(root / "m1.txt");
    sim.store.save_text(v1, true);
    VecStore renamed(sim.store.vocab(), other.store.matrix());
    std::ofstream v2(root / "m2.txt");
    renamed.save_text(v2, true);
    std::ofstream gold(root / "gold.txt");
    write_similarity(std::get<SimilarityDataset>(sim.gold), gold);
    std::ofstream cfg(root / "config.json");
    cfg << "{\n"
        << "  \"seed\": 42,\n"
        << "  \"models\": [\n"
        << "    {\"name\": \"planted\", \"path\": \"" << (root / "m1.txt").string()
        << "\"},\n"
        << "    {\"name\": \"random\", \"path\": \"" << (root / "m2.txt").string()
        << "\"}\n"
        << "  ],\n"
        << "  \"datasets\": [{\"name\": \"sim\", \"kind\": \"similarity\", "
        << "\"path\": \"" << (root / "gold.txt").string() << "\"}],\n"
        << "  \"tasks\": [{\"type\": \"similarity\", \"dataset\": \"sim\"}],\n"
        << "  \"external_scores\": [\n"
        << "    {\"model\": \"planted\", \"metric\": \"ppl\", \"value\": 79.1, "
        << "\"direction\": \"lower-better\"},\n"
        << "    {\"model\": \"random\", \"metric\": \"ppl\", \"value\": 102.3, "
        << "\"direction\": \"lower-better\"}\n"
        << "  ]\n"
        << "}\n";
  }

  RunConfig config = load_config((root / "config.json").string());
  RunOptions first;
  first.output_dir = (root / "out_a").string();
  RunOptions second;
  second.output_dir = (root / "out_b").string();
  ReportBundle a = run(config, first);
  ReportBundle b = run(config, second);
  require(a.files_written == b.files_written, "report file lists differ");
  require(a.files_written.size() >= 4, "bundle unexpectedly small");
  for (const auto& file : a.files_written) {
    std::ifstream fa(root / "out_a" / file, std::ios::binary);
    std::ifstream fb(root / "out_b" / file, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    require(sa.str() == sb.str(), "file " + file + " differs between runs");
    require(!sa.str().empty(), "file " + file + " is empty");
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  criterion(1, "analogy argmax equals naive scan on 10k words, 200 questions",
            criterion_1_analogy_oracle);
  criterion(2, "similarity-monotone fixture: Spearman exactly +1 / -1",
            criterion_2_similarity_planted);
  criterion(3, "planted analogy: 100% both methods, 90% after corruption",
            criterion_3_analogy_planted);
  criterion(4, "outlier compactness identity and hand-tallied Accuracy/OPP",
            criterion_4_outlier_identity);
  criterion(5, "blob purity 1.0 and exhaustive k-means optimum",
            criterion_5_clustering);
  criterion(6, "qvec identity, permutation invariance, brute-force fixture",
            criterion_6_qvec);
  criterion(7, "tagger gradients vs finite differences; separable corpus >=99%",
            criterion_7_tagger);
  criterion(8, "pearson/spearman closed forms and affine invariance",
            criterion_8_statistics);
  criterion(9, "planted 16-model consistency matrix and sign flip",
            criterion_9_consistency_matrix);
  criterion(10, "binary round-trip 1/100/10000 and Google fixture counts",
            criterion_10_formats);
  criterion(11, "byte-identical report bundles on rerun",
            criterion_11_determinism);

  if (g_failures == 0) {
    std::printf("all 11 acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  }
  return g_failures;
}
