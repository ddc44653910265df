#include "wordeval/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "wordeval/analysis.hpp"
#include "wordeval/prng.hpp"

namespace wordeval {

namespace {

// Strict vocabulary resolution for intrinsic evaluation: exact/lowercase
// hit on a usable (nonzero) row, independent of the store's OOV policy.
std::optional<std::size_t> resolve(const VecStore& store, const std::string& word) {
  auto idx = store.find(word);
  if (idx && store.usable(*idx)) return idx;
  return std::nullopt;
}

double column_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double mx = x.mean();
  double my = y.mean();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double dx = x(i) - mx;
    double dy = y(i) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

EvalScore eval_similarity(const VecStore& store, const SimilarityDataset& ds) {
  std::vector<double> model_scores, gold_scores;
  for (const auto& pair : ds.pairs) {
    auto i1 = resolve(store, pair.word1);
    auto i2 = resolve(store, pair.word2);
    if (!i1 || !i2) continue;
    model_scores.push_back(cosine(store.row(*i1).transpose(),
                                  store.row(*i2).transpose()));
    gold_scores.push_back(pair.gold);
  }
  if (model_scores.size() < 2) {
    throw Error(ErrorKind::Eval, "similarity '" + ds.name +
                                     "': fewer than 2 usable pairs");
  }
  EvalScore score;
  score.evaluator = "similarity";
  score.primary = spearman(model_scores, gold_scores);
  score.components["spearman"] = score.primary;
  score.components["pearson"] = pearson(model_scores, gold_scores);
  score.components["usable_pairs"] = static_cast<double>(model_scores.size());
  score.coverage =
      static_cast<double>(model_scores.size()) / static_cast<double>(ds.pairs.size());
  score.direction = Direction::HigherBetter;
  return score;
}

std::optional<std::string> solve_analogy(const VecStore& store,
                                         const std::string& a,
                                         const std::string& b,
                                         const std::string& c,
                                         const AnalogyMethod& method) {
  auto ia = resolve(store, a);
  auto ib = resolve(store, b);
  auto ic = resolve(store, c);
  if (!ia || !ib || !ic) return std::nullopt;

  const Eigen::MatrixXd& m = store.matrix();
  const std::size_t n = store.size();
  auto excluded = [&](std::size_t i) {
    return i == *ia || i == *ib || i == *ic || !store.usable(i);
  };

  std::size_t best = n;
  double best_score = -std::numeric_limits<double>::infinity();

  if (method.kind == AnalogyMethod::CosAdd) {
    Eigen::VectorXd target = m.row(static_cast<Eigen::Index>(*ib)).transpose() -
                             m.row(static_cast<Eigen::Index>(*ia)).transpose() +
                             m.row(static_cast<Eigen::Index>(*ic)).transpose();
    double tnorm = target.norm();
    if (tnorm == 0.0) return std::nullopt;
    Eigen::VectorXd dots = m * target;
    for (std::size_t i = 0; i < n; ++i) {
      if (excluded(i)) continue;
      double s = dots(static_cast<Eigen::Index>(i)) / (store.row_norm(i) * tnorm);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
  } else {
    auto shifted_cosines = [&](std::size_t word_index) {
      Eigen::VectorXd v = m.row(static_cast<Eigen::Index>(word_index)).transpose();
      double vnorm = v.norm();
      Eigen::VectorXd dots = m * v;
      Eigen::VectorXd out(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        double cosv = store.usable(i)
                          ? dots(static_cast<Eigen::Index>(i)) /
                                (store.row_norm(i) * vnorm)
                          : 0.0;
        out(static_cast<Eigen::Index>(i)) = (cosv + 1.0) / 2.0;
      }
      return out;
    };
    Eigen::VectorXd sa = shifted_cosines(*ia);
    Eigen::VectorXd sb = shifted_cosines(*ib);
    Eigen::VectorXd sc = shifted_cosines(*ic);
    for (std::size_t i = 0; i < n; ++i) {
      if (excluded(i)) continue;
      Eigen::Index e = static_cast<Eigen::Index>(i);
      double s = sc(e) * sb(e) / (sa(e) + method.epsilon);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
  }
  if (best == n) return std::nullopt;
  return store.word(best);
}

EvalScore eval_analogy(const VecStore& store, const AnalogyDataset& ds,
                       const AnalogyMethod& method) {
  std::size_t total = 0, usable = 0, answered = 0, correct = 0;
  std::size_t sem_answered = 0, sem_correct = 0;
  std::size_t syn_answered = 0, syn_correct = 0;
  bool any_semantic = false, any_syntactic = false;
  EvalScore score;
  score.evaluator = "analogy";
  score.direction = Direction::HigherBetter;

  for (const auto& section : ds.sections) {
    bool syntactic = AnalogyDataset::syntactic_section(section.name);
    (syntactic ? any_syntactic : any_semantic) = true;
    std::size_t sec_answered = 0, sec_correct = 0;
    for (const auto& q : section.questions) {
      ++total;
      auto gold = resolve(store, q.d);
      if (!gold || !resolve(store, q.a) || !resolve(store, q.b) ||
          !resolve(store, q.c)) {
        continue;
      }
      ++usable;
      auto predicted = solve_analogy(store, q.a, q.b, q.c, method);
      if (!predicted) continue;
      ++answered;
      ++sec_answered;
      bool ok = store.find(*predicted) == gold;
      if (ok) {
        ++correct;
        ++sec_correct;
      }
      if (syntactic) {
        ++syn_answered;
        syn_correct += ok ? 1 : 0;
      } else {
        ++sem_answered;
        sem_correct += ok ? 1 : 0;
      }
    }
    if (sec_answered > 0) {
      score.components["section/" + section.name] =
          static_cast<double>(sec_correct) / static_cast<double>(sec_answered);
    }
  }

  if (answered == 0) {
    throw Error(ErrorKind::Eval,
                "analogy '" + ds.name + "': zero answerable questions");
  }
  score.primary = static_cast<double>(correct) / static_cast<double>(answered);
  score.components["accuracy_over_all"] =
      total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  score.components["answered"] = static_cast<double>(answered);
  if (any_semantic && any_syntactic) {
    if (sem_answered > 0) {
      score.components["semantic"] =
          static_cast<double>(sem_correct) / static_cast<double>(sem_answered);
    }
    if (syn_answered > 0) {
      score.components["syntactic"] =
          static_cast<double>(syn_correct) / static_cast<double>(syn_answered);
    }
  }
  score.coverage =
      total == 0 ? 0.0 : static_cast<double>(usable) / static_cast<double>(total);
  return score;
}

namespace {

Eigen::VectorXd squared_distances_to(const Eigen::MatrixXd& points,
                                     const Eigen::VectorXd& center) {
  return (points.rowwise() - center.transpose()).rowwise().squaredNorm();
}

std::vector<Eigen::Index> kmeanspp_seed(const Eigen::MatrixXd& points,
                                        std::size_t k, Prng& rng) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd best_dist2 = squared_distances_to(points, points.row(centers[0]).transpose());
  while (centers.size() < k) {
    double total = best_dist2.sum();
    Eigen::Index chosen;
    if (total > 0.0) {
      double x = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += best_dist2(i);
        if (x < acc) {
          chosen = i;
          break;
        }
      }
    } else {
      // All remaining mass is zero (duplicate points); fall back to uniform.
      chosen = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.push_back(chosen);
    best_dist2 =
        best_dist2.cwiseMin(squared_distances_to(points, points.row(chosen).transpose()));
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k,
                    std::uint64_t seed, std::size_t restarts) {
  const Eigen::Index n = points.rows();
  if (k == 0 || static_cast<Eigen::Index>(k) > n) {
    throw Error(ErrorKind::Invalid,
                "kmeans: k must be in [1, number of points]");
  }
  if (restarts == 0) restarts = 1;
  constexpr int kMaxIterations = 300;

  Prng rng(seed);
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();

  for (std::size_t run = 0; run < restarts; ++run) {
    Eigen::MatrixXd centroids(static_cast<Eigen::Index>(k), points.cols());
    auto seeds = kmeanspp_seed(points, k, rng);
    for (std::size_t j = 0; j < k; ++j) {
      centroids.row(static_cast<Eigen::Index>(j)) = points.row(seeds[j]);
    }

    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    std::vector<double> point_dist2(static_cast<std::size_t>(n), 0.0);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
          double d = (points.row(i) - centroids.row(static_cast<Eigen::Index>(j)))
                         .squaredNorm();
          if (d < best_d) {
            best_d = d;
            arg = static_cast<int>(j);
          }
        }
        point_dist2[static_cast<std::size_t>(i)] = best_d;
        if (assignment[static_cast<std::size_t>(i)] != arg) {
          assignment[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }

      // Re-seed empty clusters with the point farthest from its centroid.
      std::vector<Eigen::Index> counts(k, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
      }
      std::vector<bool> stolen(static_cast<std::size_t>(n), false);
      bool reseeded = false;
      for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] > 0) continue;
        Eigen::Index far = -1;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (stolen[static_cast<std::size_t>(i)]) continue;
          if (counts[static_cast<std::size_t>(
                  assignment[static_cast<std::size_t>(i)])] <= 1) {
            continue;
          }
          if (point_dist2[static_cast<std::size_t>(i)] > far_d) {
            far_d = point_dist2[static_cast<std::size_t>(i)];
            far = i;
          }
        }
        if (far < 0) continue;
        stolen[static_cast<std::size_t>(far)] = true;
        --counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(far)])];
        assignment[static_cast<std::size_t>(far)] = static_cast<int>(j);
        ++counts[j];
        centroids.row(static_cast<Eigen::Index>(j)) = points.row(far);
        reseeded = true;
      }

      if (!changed && !reseeded) break;

      centroids.setZero();
      std::vector<double> sizes(k, 0.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        int c = assignment[static_cast<std::size_t>(i)];
        centroids.row(c) += points.row(i);
        sizes[static_cast<std::size_t>(c)] += 1.0;
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (sizes[j] > 0.0) centroids.row(static_cast<Eigen::Index>(j)) /= sizes[j];
      }
    }

    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      wcss += (points.row(i) -
               centroids.row(assignment[static_cast<std::size_t>(i)]))
                  .squaredNorm();
    }
    if (wcss < best.wcss) {
      best.wcss = wcss;
      best.assignment = assignment;
      best.centroids = centroids;
    }
  }
  return best;
}

double purity(const std::vector<int>& assignment,
              const std::vector<std::string>& gold_categories) {
  if (assignment.empty()) {
    throw Error(ErrorKind::Invalid, "purity of an empty assignment");
  }
  if (assignment.size() != gold_categories.size()) {
    throw Error(ErrorKind::Invalid, "assignment/gold length mismatch");
  }
  std::map<int, std::map<std::string, std::size_t>> cluster_counts;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    ++cluster_counts[assignment[i]][gold_categories[i]];
  }
  std::size_t majority_total = 0;
  for (const auto& [cluster, counts] : cluster_counts) {
    std::size_t best = 0;
    for (const auto& [category, count] : counts) best = std::max(best, count);
    majority_total += best;
  }
  return static_cast<double>(majority_total) /
         static_cast<double>(assignment.size());
}

EvalScore eval_categorization(const VecStore& store,
                              const CategorizationDataset& ds,
                              std::uint64_t seed, std::size_t restarts) {
  std::vector<std::size_t> rows;
  std::vector<std::string> gold;
  std::set<std::string> usable_categories;
  for (const auto& entry : ds.entries) {
    auto idx = resolve(store, entry.word);
    if (!idx) continue;
    rows.push_back(*idx);
    gold.push_back(entry.category);
    usable_categories.insert(entry.category);
  }
  if (rows.empty()) {
    throw Error(ErrorKind::Eval,
                "categorization '" + ds.name + "': no usable words");
  }
  std::size_t k = usable_categories.size();
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), store.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) =
        store.row(rows[i]) / store.row_norm(rows[i]);
  }
  KMeansResult clusters = kmeans(points, k, seed, restarts);

  EvalScore score;
  score.evaluator = "categorization";
  score.primary = purity(clusters.assignment, gold);
  score.components["purity"] = score.primary;
  score.components["clusters"] = static_cast<double>(k);
  score.components["usable_words"] = static_cast<double>(rows.size());
  score.components["wcss"] = clusters.wcss;
  score.coverage =
      static_cast<double>(rows.size()) / static_cast<double>(ds.entries.size());
  score.direction = Direction::HigherBetter;
  return score;
}

double compactness(const Eigen::MatrixXd& sim, std::size_t leave_out) {
  const Eigen::Index size = sim.rows();
  if (size != sim.cols()) {
    throw Error(ErrorKind::Invalid, "similarity table must be square");
  }
  if (size < 3) {
    throw Error(ErrorKind::Invalid, "compactness needs at least 3 words");
  }
  if (leave_out >= static_cast<std::size_t>(size)) {
    throw Error(ErrorKind::Invalid, "leave_out index out of range");
  }
  const Eigen::Index w = static_cast<Eigen::Index>(leave_out);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    if (i == w) continue;
    for (Eigen::Index j = 0; j < size; ++j) {
      if (j == w || j == i) continue;
      sum += sim(i, j);
    }
  }
  const double n = static_cast<double>(size - 1);
  return sum / (n * (n - 1.0));
}

OutlierResult detect_outlier(const VecStore& store, const OutlierGroup& group) {
  const std::size_t size = group.words.size();
  if (size < 3) {
    throw Error(ErrorKind::Invalid, "outlier group smaller than 3 words");
  }
  std::vector<std::size_t> rows;
  rows.reserve(size);
  for (const auto& word : group.words) {
    auto idx = resolve(store, word);
    if (!idx) {
      throw Error(ErrorKind::Eval, "outlier group word '" + word +
                                       "' not usable in store");
    }
    rows.push_back(*idx);
  }

  Eigen::MatrixXd sim(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) {
    sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t j = i + 1; j < size; ++j) {
      double c = cosine(store.row(rows[i]).transpose(), store.row(rows[j]).transpose());
      sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
      sim(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
    }
  }

  std::vector<double> scores(size);
  for (std::size_t i = 0; i < size; ++i) scores[i] = compactness(sim, i);

  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] < scores[y];
    // Pessimistic tie handling: the true outlier sorts first.
    bool tx = x == group.outlier_index;
    bool ty = y == group.outlier_index;
    if (tx != ty) return tx;
    return group.words[x] < group.words[y];
  });

  OutlierResult result;
  result.predicted = group.words[order.back()];
  result.outlier_position =
      static_cast<std::size_t>(std::find(order.begin(), order.end(),
                                         group.outlier_index) -
                               order.begin());
  return result;
}

EvalScore eval_outlier(const VecStore& store, const OutlierDataset& ds) {
  std::size_t usable = 0, detected = 0;
  double opp_sum = 0.0;
  for (const auto& group : ds.groups) {
    bool ok = group.words.size() >= 3;
    for (const auto& word : group.words) {
      ok = ok && resolve(store, word).has_value();
    }
    if (!ok) continue;
    ++usable;
    OutlierResult r = detect_outlier(store, group);
    std::size_t n = group.words.size() - 1;
    if (r.outlier_position == n) ++detected;
    opp_sum += static_cast<double>(r.outlier_position) / static_cast<double>(n);
  }
  if (usable == 0) {
    throw Error(ErrorKind::Eval, "outlier '" + ds.name + "': no usable groups");
  }
  EvalScore score;
  score.evaluator = "outlier";
  score.primary = static_cast<double>(detected) / static_cast<double>(usable);
  score.components["accuracy"] = score.primary;
  score.components["opp"] = opp_sum / static_cast<double>(usable);
  score.components["usable_groups"] = static_cast<double>(usable);
  score.coverage =
      static_cast<double>(usable) / static_cast<double>(ds.groups.size());
  score.direction = Direction::HigherBetter;
  return score;
}

EvalScore qvec(const VecStore& store, const LinguisticMatrix& ling,
               bool clamp_negative) {
  std::vector<std::size_t> store_rows;
  std::vector<std::size_t> ling_rows;
  for (std::size_t i = 0; i < ling.vocab.size(); ++i) {
    if (auto idx = store.find(ling.vocab[i])) {
      store_rows.push_back(*idx);
      ling_rows.push_back(i);
    }
  }
  if (store_rows.size() < 2) {
    throw Error(ErrorKind::Eval,
                "qvec '" + ling.name + "': fewer than 2 shared words");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(store_rows.size());
  Eigen::MatrixXd embed(n, store.dim());
  Eigen::MatrixXd props(n, static_cast<Eigen::Index>(ling.props.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    embed.row(i) = store.row(store_rows[static_cast<std::size_t>(i)]);
    props.row(i) = ling.values.row(
        static_cast<Eigen::Index>(ling_rows[static_cast<std::size_t>(i)]));
  }

  double total = 0.0;
  for (Eigen::Index i = 0; i < embed.cols(); ++i) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index j = 0; j < props.cols(); ++j) {
      double r = column_correlation(embed.col(i), props.col(j));
      if (std::isnan(r)) continue;
      if (std::isnan(best) || r > best) best = r;
    }
    double contribution = std::isnan(best) ? 0.0 : best;
    if (clamp_negative && contribution < 0.0) contribution = 0.0;
    total += contribution;
  }

  EvalScore score;
  score.evaluator = "qvec";
  score.primary = total;
  score.components["shared_words"] = static_cast<double>(n);
  score.components["dims"] = static_cast<double>(store.dim());
  score.coverage =
      static_cast<double>(n) / static_cast<double>(ling.vocab.size());
  score.direction = Direction::HigherBetter;
  return score;
}

}  // namespace wordeval
