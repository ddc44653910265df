#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wordeval/datasets.hpp"
#include "wordeval/intrinsic.hpp"
#include "wordeval/vecstore.hpp"

namespace wordeval {

// Parameter tensors of the window classifier; Adam moments reuse the shape.
struct TaggerParams {
  Eigen::MatrixXd w1;  // (window*dim) x hidden
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // hidden x tags
  Eigen::VectorXd b2;  // tags

  static TaggerParams zeros_like(const TaggerParams& other);
  bool all_finite() const;
};

struct AdamState {
  TaggerParams m;  // first moments
  TaggerParams v;  // second moments
  long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState init(const TaggerParams& params, double lr = 1e-3);
};

// Bias-corrected Adam update, applied in place to every parameter tensor.
void adam_step(AdamState& state, TaggerParams& params, const TaggerParams& grads);

// Five-token window, 300-unit tanh hidden layer, softmax output.
struct WindowTagger {
  TaggerParams params;
  std::vector<std::string> tags;  // index = output class
  Eigen::Index input_dim = 0;     // window * embedding dim

  static constexpr int kWindow = 5;
};

struct TaggerConfig {
  std::size_t hidden = 300;
  std::size_t epochs = 10;
  std::size_t batch_size = 50;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

// Concatenated embeddings of the tokens at position-2 .. position+2.
// Out-of-sentence slots contribute an all-zero PAD block; out-of-vocabulary
// tokens contribute the store's shared UNK vector.
Eigen::VectorXd featurize(const VecStore& store,
                          const std::vector<std::string>& sentence,
                          std::size_t position);

// softmax(w2' tanh(w1' x + b1) + b2), computed with max-subtraction.
Eigen::VectorXd forward(const WindowTagger& tagger, const Eigen::VectorXd& features);

struct LossGrads {
  double loss;  // mean cross-entropy over the batch
  TaggerParams grads;
};

// Analytic gradients of the mean gold-tag negative log-probability. The
// embedding features receive no gradient: the embedding layer stays fixed.
LossGrads loss_and_gradients(const WindowTagger& tagger,
                             const Eigen::MatrixXd& features,
                             const std::vector<int>& gold_tags);

struct TrainResult {
  WindowTagger tagger;
  std::vector<double> epoch_losses;
};

// Deterministic given config.seed: fixed uniform +-1/sqrt(fan-in) init and
// epoch-wise shuffling both come from the same named PRNG.
TrainResult train_tagger(const VecStore& store, const SequenceCorpus& corpus,
                         const TaggerConfig& config);

struct TagMetrics {
  double token_accuracy = 0.0;
  double span_precision = 0.0;
  double span_recall = 0.0;
  double span_f1 = 0.0;
  std::map<std::string, std::size_t> gold_tag_counts;
  std::map<std::string, std::size_t> correct_tag_counts;
};

TagMetrics evaluate_tagging(const WindowTagger& tagger, const VecStore& store,
                            const SequenceCorpus& corpus, TagScheme scheme);

// Bundles train + evaluate for the runner: primary is token accuracy for
// per-token corpora and span F1 for BIO corpora.
EvalScore eval_tagging(const VecStore& store, const SequenceCorpus& train,
                       const SequenceCorpus& test, const TaggerConfig& config);

}  // namespace wordeval
