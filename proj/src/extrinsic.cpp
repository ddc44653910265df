#include "wordeval/extrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wordeval/prng.hpp"

namespace wordeval {

TaggerParams TaggerParams::zeros_like(const TaggerParams& other) {
  TaggerParams p;
  p.w1 = Eigen::MatrixXd::Zero(other.w1.rows(), other.w1.cols());
  p.b1 = Eigen::VectorXd::Zero(other.b1.size());
  p.w2 = Eigen::MatrixXd::Zero(other.w2.rows(), other.w2.cols());
  p.b2 = Eigen::VectorXd::Zero(other.b2.size());
  return p;
}

bool TaggerParams::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

AdamState AdamState::init(const TaggerParams& params, double lr) {
  AdamState state;
  state.m = TaggerParams::zeros_like(params);
  state.v = TaggerParams::zeros_like(params);
  state.lr = lr;
  return state;
}

namespace {

template <typename Tensor>
void adam_update_tensor(Tensor& param, Tensor& m, Tensor& v, const Tensor& grad,
                        const AdamState& state) {
  const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  m = state.beta1 * m + (1.0 - state.beta1) * grad;
  v.array() =
      state.beta2 * v.array() + (1.0 - state.beta2) * grad.array().square();
  param.array() -= state.lr * (m.array() / corr1) /
                   ((v.array() / corr2).sqrt() + state.eps);
}

}  // namespace

void adam_step(AdamState& state, TaggerParams& params, const TaggerParams& grads) {
  if (!grads.all_finite()) {
    throw Error(ErrorKind::Invalid,
                "non-finite gradient at step " + std::to_string(state.t + 1) +
                    "; aborting optimization");
  }
  ++state.t;
  adam_update_tensor(params.w1, state.m.w1, state.v.w1, grads.w1, state);
  adam_update_tensor(params.b1, state.m.b1, state.v.b1, grads.b1, state);
  adam_update_tensor(params.w2, state.m.w2, state.v.w2, grads.w2, state);
  adam_update_tensor(params.b2, state.m.b2, state.v.b2, grads.b2, state);
}

Eigen::VectorXd featurize(const VecStore& store,
                          const std::vector<std::string>& sentence,
                          std::size_t position) {
  if (position >= sentence.size()) {
    throw Error(ErrorKind::Invalid, "featurize position out of range");
  }
  const Eigen::Index dim = store.dim();
  Eigen::VectorXd features = Eigen::VectorXd::Zero(WindowTagger::kWindow * dim);
  const long p = static_cast<long>(position);
  for (int offset = -2; offset <= 2; ++offset) {
    long idx = p + offset;
    if (idx < 0 || idx >= static_cast<long>(sentence.size())) continue;  // PAD
    features.segment(static_cast<Eigen::Index>(offset + 2) * dim, dim) =
        store.vector_or_unk(sentence[static_cast<std::size_t>(idx)]);
  }
  return features;
}

namespace {

// Row-wise stable softmax of logits.
Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double mx = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - mx).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

struct BatchForward {
  Eigen::MatrixXd hidden;  // batch x hidden, post-tanh
  Eigen::MatrixXd probs;   // batch x tags
};

BatchForward forward_batch(const TaggerParams& params, const Eigen::MatrixXd& x) {
  BatchForward out;
  out.hidden =
      ((x * params.w1).rowwise() + params.b1.transpose()).array().tanh();
  out.probs =
      softmax_rows((out.hidden * params.w2).rowwise() + params.b2.transpose());
  return out;
}

}  // namespace

Eigen::VectorXd forward(const WindowTagger& tagger, const Eigen::VectorXd& features) {
  if (features.size() != tagger.input_dim) {
    throw Error(ErrorKind::Invalid, "feature dimension mismatch");
  }
  return forward_batch(tagger.params, features.transpose()).probs.row(0).transpose();
}

LossGrads loss_and_gradients(const WindowTagger& tagger,
                             const Eigen::MatrixXd& features,
                             const std::vector<int>& gold_tags) {
  const Eigen::Index batch = features.rows();
  if (batch == 0) {
    throw Error(ErrorKind::Invalid, "empty training batch");
  }
  if (static_cast<std::size_t>(batch) != gold_tags.size()) {
    throw Error(ErrorKind::Invalid, "features/gold size mismatch");
  }
  BatchForward fwd = forward_batch(tagger.params, features);

  double loss = 0.0;
  Eigen::MatrixXd dlogits = fwd.probs;
  for (Eigen::Index i = 0; i < batch; ++i) {
    int gold = gold_tags[static_cast<std::size_t>(i)];
    if (gold < 0 || gold >= fwd.probs.cols()) {
      throw Error(ErrorKind::Invalid, "gold tag id out of range");
    }
    loss -= std::log(fwd.probs(i, gold));
    dlogits(i, gold) -= 1.0;
  }
  loss /= static_cast<double>(batch);
  dlogits /= static_cast<double>(batch);

  LossGrads out;
  out.loss = loss;
  out.grads.w2 = fwd.hidden.transpose() * dlogits;
  out.grads.b2 = dlogits.colwise().sum().transpose();
  Eigen::MatrixXd dhidden = dlogits * tagger.params.w2.transpose();
  Eigen::MatrixXd dpre =
      (dhidden.array() * (1.0 - fwd.hidden.array().square())).matrix();
  out.grads.w1 = features.transpose() * dpre;
  out.grads.b1 = dpre.colwise().sum().transpose();
  return out;
}

TrainResult train_tagger(const VecStore& store, const SequenceCorpus& corpus,
                         const TaggerConfig& config) {
  if (corpus.tagset.empty()) {
    throw Error(ErrorKind::Invalid, "training corpus has an empty tagset");
  }
  if (store.oov_policy() == OovPolicy::Skip) {
    bool any = false;
    for (const auto& sentence : corpus.sentences) {
      for (const auto& token : sentence) {
        any = any || store.find(token).has_value();
      }
    }
    if (!any) {
      throw Error(ErrorKind::Eval,
                  "every training token is out of vocabulary under skip policy");
    }
  }

  const Eigen::Index dim = store.dim();
  const Eigen::Index input_dim = WindowTagger::kWindow * dim;
  const Eigen::Index hidden = static_cast<Eigen::Index>(config.hidden);
  const Eigen::Index tags = static_cast<Eigen::Index>(corpus.tagset.size());

  std::map<std::string, int> tag_id;
  for (std::size_t i = 0; i < corpus.tagset.size(); ++i) {
    tag_id[corpus.tagset[i]] = static_cast<int>(i);
  }

  // Precompute features once; training touches them in shuffled order only.
  std::size_t n_examples = 0;
  for (const auto& s : corpus.sentences) n_examples += s.size();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(n_examples), input_dim);
  std::vector<int> gold(n_examples);
  std::size_t row = 0;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    for (std::size_t t = 0; t < corpus.sentences[s].size(); ++t) {
      features.row(static_cast<Eigen::Index>(row)) =
          featurize(store, corpus.sentences[s], t).transpose();
      gold[row] = tag_id.at(corpus.labels[s][t]);
      ++row;
    }
  }

  Prng rng(config.seed);
  WindowTagger tagger;
  tagger.tags = corpus.tagset;
  tagger.input_dim = input_dim;
  tagger.params.w1 = Eigen::MatrixXd(input_dim, hidden);
  tagger.params.b1 = Eigen::VectorXd::Zero(hidden);
  tagger.params.w2 = Eigen::MatrixXd(hidden, tags);
  tagger.params.b2 = Eigen::VectorXd::Zero(tags);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (Eigen::Index i = 0; i < input_dim; ++i) {
    for (Eigen::Index j = 0; j < hidden; ++j) {
      tagger.params.w1(i, j) = rng.uniform(-bound1, bound1);
    }
  }
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Eigen::Index i = 0; i < hidden; ++i) {
    for (Eigen::Index j = 0; j < tags; ++j) {
      tagger.params.w2(i, j) = rng.uniform(-bound2, bound2);
    }
  }

  AdamState adam = AdamState::init(tagger.params, config.learning_rate);
  std::vector<std::size_t> order(n_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n_examples; start += batch_size) {
      std::size_t count = std::min(batch_size, n_examples - start);
      Eigen::MatrixXd batch(static_cast<Eigen::Index>(count), input_dim);
      std::vector<int> batch_gold(count);
      for (std::size_t i = 0; i < count; ++i) {
        batch.row(static_cast<Eigen::Index>(i)) =
            features.row(static_cast<Eigen::Index>(order[start + i]));
        batch_gold[i] = gold[order[start + i]];
      }
      LossGrads lg = loss_and_gradients(tagger, batch, batch_gold);
      adam_step(adam, tagger.params, lg.grads);
      epoch_loss += lg.loss * static_cast<double>(count);
    }
    epoch_loss /= static_cast<double>(n_examples);
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorKind::Eval, "non-finite loss in epoch " +
                                       std::to_string(epoch + 1));
    }
    result.epoch_losses.push_back(epoch_loss);
  }
  result.tagger = std::move(tagger);
  return result;
}

namespace {

struct Span {
  std::string type;
  std::size_t start;
  std::size_t end;  // inclusive

  bool operator==(const Span&) const = default;
};

// conlleval-style BIO decoding: B-X always opens a span; a stray I-X (after
// O, start of sentence, or a different type) opens one too.
std::vector<Span> decode_spans(const std::vector<std::string>& tags) {
  std::vector<Span> spans;
  std::string open_type;
  std::size_t open_start = 0;
  bool open = false;
  auto close = [&](std::size_t end) {
    if (open) spans.push_back({open_type, open_start, end});
    open = false;
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    bool b = tag.size() > 2 && tag[0] == 'B' && tag[1] == '-';
    bool inside = tag.size() > 2 && tag[0] == 'I' && tag[1] == '-';
    std::string type = (b || inside) ? tag.substr(2) : std::string();
    if (b || (inside && (!open || open_type != type))) {
      close(i == 0 ? 0 : i - 1);
      open = true;
      open_type = type;
      open_start = i;
    } else if (!inside) {
      close(i == 0 ? 0 : i - 1);
    }
  }
  close(tags.empty() ? 0 : tags.size() - 1);
  return spans;
}

}  // namespace

TagMetrics evaluate_tagging(const WindowTagger& tagger, const VecStore& store,
                            const SequenceCorpus& corpus, TagScheme scheme) {
  TagMetrics metrics;
  std::size_t total = 0, correct = 0;
  std::size_t gold_spans = 0, predicted_spans = 0, matched_spans = 0;

  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const auto& sentence = corpus.sentences[s];
    const auto& gold = corpus.labels[s];
    std::vector<std::string> predicted(sentence.size());
    for (std::size_t t = 0; t < sentence.size(); ++t) {
      Eigen::VectorXd probs = forward(tagger, featurize(store, sentence, t));
      Eigen::Index arg = 0;
      probs.maxCoeff(&arg);
      predicted[t] = tagger.tags[static_cast<std::size_t>(arg)];
      ++total;
      ++metrics.gold_tag_counts[gold[t]];
      if (predicted[t] == gold[t]) {
        ++correct;
        ++metrics.correct_tag_counts[gold[t]];
      }
    }
    if (scheme == TagScheme::BioSpans) {
      auto gspans = decode_spans(gold);
      auto pspans = decode_spans(predicted);
      gold_spans += gspans.size();
      predicted_spans += pspans.size();
      for (const auto& span : pspans) {
        if (std::find(gspans.begin(), gspans.end(), span) != gspans.end()) {
          ++matched_spans;
        }
      }
    }
  }

  metrics.token_accuracy =
      total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  if (scheme == TagScheme::BioSpans) {
    metrics.span_precision =
        predicted_spans == 0 ? 0.0
                             : static_cast<double>(matched_spans) /
                                   static_cast<double>(predicted_spans);
    metrics.span_recall = gold_spans == 0 ? 0.0
                                          : static_cast<double>(matched_spans) /
                                                static_cast<double>(gold_spans);
    double pr = metrics.span_precision + metrics.span_recall;
    metrics.span_f1 =
        pr == 0.0 ? 0.0 : 2.0 * metrics.span_precision * metrics.span_recall / pr;
  }
  return metrics;
}

EvalScore eval_tagging(const VecStore& store, const SequenceCorpus& train,
                       const SequenceCorpus& test, const TaggerConfig& config) {
  TrainResult trained = train_tagger(store, train, config);
  TagScheme scheme = test.scheme;
  TagMetrics metrics = evaluate_tagging(trained.tagger, store, test, scheme);

  EvalScore score;
  score.evaluator = "tagging";
  score.direction = Direction::HigherBetter;
  score.primary = scheme == TagScheme::BioSpans ? metrics.span_f1
                                                : metrics.token_accuracy;
  score.components["token_accuracy"] = metrics.token_accuracy;
  if (scheme == TagScheme::BioSpans) {
    score.components["span_f1"] = metrics.span_f1;
    score.components["span_precision"] = metrics.span_precision;
    score.components["span_recall"] = metrics.span_recall;
  }
  score.components["final_train_loss"] = trained.epoch_losses.back();
  score.coverage = coverage(test, store.with_policy(OovPolicy::Skip)).ratio;
  return score;
}

}  // namespace wordeval
