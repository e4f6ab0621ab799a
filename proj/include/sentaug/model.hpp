#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sentaug/classifier.hpp"
#include "sentaug/corpus.hpp"
#include "sentaug/embeddings.hpp"
#include "sentaug/rng.hpp"

namespace sentaug {

enum class Arch { Cnn, Rnn };
enum class Precision { F32, F64 };

Arch arch_from_string(const std::string& s);
std::string arch_to_string(Arch a);

struct ModelConfig {
  Arch arch = Arch::Cnn;
  int emb_dim = 300;
  std::vector<int> windows = {3, 4, 5};  // CNN window sizes
  int filters_per_window = 100;
  int lstm_hidden = 150;

  int repr_dim() const;
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 10;
  uint64_t seed = 1;
  int max_seq_len = 400;  // training-time truncation
  Precision precision = Precision::F64;
  bool freeze_embeddings = false;
  double dropout = 0.0;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0;
  double dev_accuracy = 0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;  // epoch whose checkpoint was kept
};

template <typename Scalar>
struct ParamBlocksT {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Mat embed;                      // V x e; row 0 = <pad>, frozen at zero
  std::vector<Mat> conv_w;        // per window: nf x (w*e)
  std::vector<Mat> conv_b;        // per window: nf x 1
  Mat wx, wh, lstm_b;             // 4H x e, 4H x H, 4H x 1 (gate order i,f,g,o)
  Mat heads;                      // L x d

  std::vector<Mat*> blocks();
  std::vector<const Mat*> blocks() const;
  std::vector<std::string> block_names() const;  // aligned with blocks()
  void set_zero();
  static ParamBlocksT zeros_like(const ParamBlocksT& other);

  template <typename T>
  ParamBlocksT<T> cast() const {
    ParamBlocksT<T> out;
    out.embed = embed.template cast<T>();
    for (const auto& m : conv_w) out.conv_w.push_back(m.template cast<T>());
    for (const auto& m : conv_b) out.conv_b.push_back(m.template cast<T>());
    out.wx = wx.template cast<T>();
    out.wh = wh.template cast<T>();
    out.lstm_b = lstm_b.template cast<T>();
    out.heads = heads.template cast<T>();
    return out;
  }
};

// CNN (windowed convolution + tanh + max-over-time) or single-layer LSTM
// (final hidden state), with one linear decision head per label.
template <typename Scalar>
class TextModelT : public Classifier {
 public:
  using Blocks = ParamBlocksT<Scalar>;
  using Mat = typename Blocks::Mat;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Seeded random initialization; init_embeddings (optional) provides rows
  // for vocab words it contains, everything else is uniform in [-0.25, 0.25].
  TextModelT(ModelConfig config, LabelSet labels, Vocabulary vocab,
             const EmbeddingTable* init_embeddings, uint64_t seed);
  TextModelT(ModelConfig config, LabelSet labels, Vocabulary vocab, Blocks params);

  // Classifier
  Eigen::VectorXd represent(const std::vector<Token>& tokens) const override;
  Eigen::VectorXd decide(const Eigen::VectorXd& repr) const override;
  const LabelSet& labels() const override { return labels_; }

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  int repr_dim() const { return cfg_.repr_dim(); }
  Blocks& params() { return params_; }
  const Blocks& params() const { return params_; }

  std::vector<int> to_ids(const std::vector<Token>& tokens) const;

  // Cross-entropy loss of one example under softmax over all heads; when
  // grads is non-null the gradient is accumulated (+=) into it.
  double example_loss(const std::vector<int>& ids, int gold, Blocks* grads = nullptr,
                      Rng* dropout_rng = nullptr, double dropout = 0.0) const;

  // Adam on mean cross-entropy; keeps the epoch checkpoint with the best
  // accuracy on the (possibly augmented) dev split. Deterministic in seed.
  TrainHistory train(const Dataset& data, const TrainConfig& config);

  double accuracy(const std::vector<Example>& split, bool suppress_aug) const;

  // Max relative error |g_a - g_n| / max(|g_a|, |g_n|, 1e-8) between analytic
  // and central-difference gradients over all trainable parameters (the pad
  // embedding row is a constant). 64-bit scalars only. block_filter limits
  // the sweep to blocks with that name (e.g. "heads"); null checks all.
  double grad_check(const std::vector<Token>& tokens, const std::string& gold, double epsilon,
                    const char* block_filter = nullptr) const;

  TextModelT<double> to_double() const;

 private:
  struct CnnFwd {
    int n0 = 0;                          // unpadded length
    Mat xt;                              // e x n (transposed embedded input)
    std::vector<Vec> pooled;             // per window: nf
    std::vector<std::vector<int>> best;  // per window: argmax position per filter
    Vec repr;
  };
  struct LstmFwd {
    Mat x;                       // e x n
    Mat gi, gf, gg, go, c, tc;   // H x n each
    Mat h;                       // H x (n+1), col 0 = h_0 = 0
    Vec repr;
  };

  Vec represent_ids(const std::vector<int>& ids) const;
  CnnFwd cnn_forward(const std::vector<int>& ids) const;
  LstmFwd lstm_forward(const std::vector<int>& ids) const;

  ModelConfig cfg_;
  LabelSet labels_;
  Vocabulary vocab_;
  Blocks params_;
};

using TextModel = TextModelT<double>;

extern template class TextModelT<float>;
extern template class TextModelT<double>;

// Versioned binary checkpoint; parameters stored as little-endian 64-bit
// reals. Loading validates the vocabulary hash.
void save_checkpoint(const TextModel& model, const std::string& path);
TextModel load_checkpoint(const std::string& path, const Vocabulary& vocab);

// Precision dispatch: trains in float when config asks for F32, returning the
// parameters widened to double either way.
std::pair<TextModel, TrainHistory> train_classifier(const Dataset& data,
                                                    const ModelConfig& model_config,
                                                    const TrainConfig& train_config,
                                                    const Vocabulary& vocab,
                                                    const EmbeddingTable* init_embeddings);

}  // namespace sentaug
