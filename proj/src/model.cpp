#include "sentaug/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace sentaug {

Arch arch_from_string(const std::string& s) {
  if (s == "cnn") return Arch::Cnn;
  if (s == "rnn") return Arch::Rnn;
  throw Error("unknown architecture '" + s + "' (expected cnn or rnn)");
}

std::string arch_to_string(Arch a) { return a == Arch::Cnn ? "cnn" : "rnn"; }

int ModelConfig::repr_dim() const {
  return arch == Arch::Cnn ? filters_per_window * static_cast<int>(windows.size()) : lstm_hidden;
}

void ModelConfig::validate() const {
  if (emb_dim < 1) throw Error("model: emb_dim must be >= 1");
  if (arch == Arch::Cnn) {
    if (windows.empty()) throw Error("model: need at least one window size");
    for (int w : windows)
      if (w < 1) throw Error("model: window sizes must be >= 1");
    if (filters_per_window < 1) throw Error("model: filters_per_window must be >= 1");
  } else if (lstm_hidden < 1) {
    throw Error("model: lstm_hidden must be >= 1");
  }
}

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw Error("train: learning rate must be positive");
  if (batch_size < 1) throw Error("train: batch size must be positive");
  if (epochs < 1) throw Error("train: epoch count must be positive");
  if (max_seq_len < 1) throw Error("train: max_seq_len must be >= 1");
  if (dropout < 0 || dropout >= 1) throw Error("train: dropout must be in [0, 1)");
}

template <typename S>
std::vector<typename ParamBlocksT<S>::Mat*> ParamBlocksT<S>::blocks() {
  std::vector<Mat*> out{&embed};
  for (auto& m : conv_w) out.push_back(&m);
  for (auto& m : conv_b) out.push_back(&m);
  out.push_back(&wx);
  out.push_back(&wh);
  out.push_back(&lstm_b);
  out.push_back(&heads);
  return out;
}

template <typename S>
std::vector<const typename ParamBlocksT<S>::Mat*> ParamBlocksT<S>::blocks() const {
  std::vector<const Mat*> out{&embed};
  for (auto& m : conv_w) out.push_back(&m);
  for (auto& m : conv_b) out.push_back(&m);
  out.push_back(&wx);
  out.push_back(&wh);
  out.push_back(&lstm_b);
  out.push_back(&heads);
  return out;
}

template <typename S>
std::vector<std::string> ParamBlocksT<S>::block_names() const {
  std::vector<std::string> out{"embed"};
  for (size_t i = 0; i < conv_w.size(); ++i) out.push_back("conv_w");
  for (size_t i = 0; i < conv_b.size(); ++i) out.push_back("conv_b");
  out.push_back("wx");
  out.push_back("wh");
  out.push_back("lstm_b");
  out.push_back("heads");
  return out;
}

template <typename S>
void ParamBlocksT<S>::set_zero() {
  for (auto* m : blocks()) m->setZero();
}

template <typename S>
ParamBlocksT<S> ParamBlocksT<S>::zeros_like(const ParamBlocksT& other) {
  ParamBlocksT out = other;
  out.set_zero();
  return out;
}

namespace {

template <typename S>
S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

// Adam with standard bias correction; the pad embedding row never moves
// because its gradient is zeroed before each step.
template <typename S>
struct AdamT {
  ParamBlocksT<S> m, v;
  long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  explicit AdamT(const ParamBlocksT<S>& shape)
      : m(ParamBlocksT<S>::zeros_like(shape)), v(ParamBlocksT<S>::zeros_like(shape)) {}

  void step(ParamBlocksT<S>& p, const ParamBlocksT<S>& g, double lr) {
    ++t;
    const S b1 = static_cast<S>(beta1), b2 = static_cast<S>(beta2);
    const S c1 = static_cast<S>(1.0 - std::pow(beta1, t));
    const S c2 = static_cast<S>(1.0 - std::pow(beta2, t));
    auto pb = p.blocks();
    auto mb = m.blocks();
    auto vb = v.blocks();
    auto gb = g.blocks();
    for (size_t k = 0; k < pb.size(); ++k) {
      if (pb[k]->size() == 0) continue;
      auto& M = *mb[k];
      auto& V = *vb[k];
      const auto& G = *gb[k];
      M = b1 * M + (S(1) - b1) * G;
      V = (b2 * V.array() + (S(1) - b2) * G.array().square()).matrix();
      pb[k]->array() -=
          static_cast<S>(lr) * (M.array() / c1) / ((V.array() / c2).sqrt() + static_cast<S>(eps));
    }
  }
};

}  // namespace

template <typename S>
TextModelT<S>::TextModelT(ModelConfig config, LabelSet labels, Vocabulary vocab,
                          const EmbeddingTable* init_embeddings, uint64_t seed)
    : cfg_(std::move(config)), labels_(std::move(labels)), vocab_(std::move(vocab)) {
  cfg_.validate();
  labels_.validate();
  Rng rng(mix_seed(seed, "model-init"));
  const int e = cfg_.emb_dim;
  const auto V = static_cast<Eigen::Index>(vocab_.size());
  if (init_embeddings && init_embeddings->dim() != e)
    throw Error("model: embedding table dimension " + std::to_string(init_embeddings->dim()) +
                " does not match emb_dim " + std::to_string(e));

  params_.embed.setZero(V, e);
  for (Eigen::Index i = 1; i < V; ++i) {
    const std::string& w = vocab_.words[static_cast<size_t>(i)];
    if (init_embeddings && init_embeddings->contains(w)) {
      params_.embed.row(i) = init_embeddings->vector(w).transpose().template cast<S>();
    } else {
      for (int j = 0; j < e; ++j)
        params_.embed(i, j) = static_cast<S>(rng.next_real(-0.25, 0.25));
    }
  }

  auto uniform_fill = [&](Mat& m, double bound) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        m(i, j) = static_cast<S>(rng.next_real(-bound, bound));
  };

  if (cfg_.arch == Arch::Cnn) {
    for (int w : cfg_.windows) {
      Mat cw(cfg_.filters_per_window, w * e);
      uniform_fill(cw, 1.0 / std::sqrt(static_cast<double>(w * e)));
      params_.conv_w.push_back(std::move(cw));
      params_.conv_b.push_back(Mat::Zero(cfg_.filters_per_window, 1));
    }
    params_.wx.resize(0, 0);
    params_.wh.resize(0, 0);
    params_.lstm_b.resize(0, 0);
  } else {
    const int H = cfg_.lstm_hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(H));
    params_.wx.resize(4 * H, e);
    params_.wh.resize(4 * H, H);
    uniform_fill(params_.wx, bound);
    uniform_fill(params_.wh, bound);
    params_.lstm_b = Mat::Zero(4 * H, 1);
    params_.lstm_b.block(H, 0, H, 1).setOnes();  // forget-gate bias
  }

  params_.heads.resize(static_cast<Eigen::Index>(labels_.size()), cfg_.repr_dim());
  uniform_fill(params_.heads, 1.0 / std::sqrt(static_cast<double>(cfg_.repr_dim())));
}

template <typename S>
TextModelT<S>::TextModelT(ModelConfig config, LabelSet labels, Vocabulary vocab, Blocks params)
    : cfg_(std::move(config)),
      labels_(std::move(labels)),
      vocab_(std::move(vocab)),
      params_(std::move(params)) {
  cfg_.validate();
  labels_.validate();
}

template <typename S>
std::vector<int> TextModelT<S>::to_ids(const std::vector<Token>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab_.id(t.norm));
  return ids;
}

template <typename S>
typename TextModelT<S>::CnnFwd TextModelT<S>::cnn_forward(const std::vector<int>& ids) const {
  const int e = cfg_.emb_dim;
  const int nf = cfg_.filters_per_window;
  const int wmax = *std::max_element(cfg_.windows.begin(), cfg_.windows.end());
  CnnFwd f;
  f.n0 = static_cast<int>(ids.size());
  const int n = std::max(f.n0, wmax);  // right-pad short inputs with <pad>
  f.xt.setZero(e, n);
  for (int i = 0; i < f.n0; ++i) f.xt.col(i) = params_.embed.row(ids[i]).transpose();

  f.repr.resize(cfg_.repr_dim());
  for (size_t wi = 0; wi < cfg_.windows.size(); ++wi) {
    const int w = cfg_.windows[wi];
    const int P = n - w + 1;
    // column p of the window matrix is x_p..x_{p+w-1} flattened; in the e x n
    // transposed layout those are contiguous slices with stride e
    Eigen::Map<const Mat, 0, Eigen::OuterStride<>> win(f.xt.data(), w * e, P,
                                                       Eigen::OuterStride<>(e));
    Mat act = ((params_.conv_w[wi] * win).colwise() + params_.conv_b[wi].col(0))
                  .array()
                  .tanh()
                  .matrix();
    Vec pooled(nf);
    std::vector<int> best(nf);
    for (int k = 0; k < nf; ++k) {
      Eigen::Index p;
      pooled[k] = act.row(k).maxCoeff(&p);
      best[k] = static_cast<int>(p);
    }
    f.repr.segment(static_cast<Eigen::Index>(wi) * nf, nf) = pooled;
    f.pooled.push_back(std::move(pooled));
    f.best.push_back(std::move(best));
  }
  return f;
}

template <typename S>
typename TextModelT<S>::LstmFwd TextModelT<S>::lstm_forward(const std::vector<int>& ids) const {
  const int H = cfg_.lstm_hidden;
  const int n = static_cast<int>(ids.size());
  LstmFwd f;
  f.x.resize(cfg_.emb_dim, n);
  for (int t = 0; t < n; ++t) f.x.col(t) = params_.embed.row(ids[t]).transpose();
  f.gi.resize(H, n);
  f.gf.resize(H, n);
  f.gg.resize(H, n);
  f.go.resize(H, n);
  f.c.setZero(H, n);
  f.tc.resize(H, n);
  f.h.setZero(H, n + 1);
  for (int t = 0; t < n; ++t) {
    Vec z = params_.wx * f.x.col(t) + params_.wh * f.h.col(t) + params_.lstm_b.col(0);
    for (int k = 0; k < H; ++k) {
      f.gi(k, t) = sigmoid(z[k]);
      f.gf(k, t) = sigmoid(z[H + k]);
      f.gg(k, t) = std::tanh(z[2 * H + k]);
      f.go(k, t) = sigmoid(z[3 * H + k]);
    }
    Vec c_prev = t > 0 ? Vec(f.c.col(t - 1)) : Vec(Vec::Zero(H));
    f.c.col(t) = f.gf.col(t).cwiseProduct(c_prev) + f.gi.col(t).cwiseProduct(f.gg.col(t));
    f.tc.col(t) = f.c.col(t).array().tanh().matrix();
    f.h.col(t + 1) = f.go.col(t).cwiseProduct(f.tc.col(t));
  }
  f.repr = f.h.col(n);
  return f;
}

template <typename S>
typename TextModelT<S>::Vec TextModelT<S>::represent_ids(const std::vector<int>& ids) const {
  if (ids.empty()) throw Error("represent: empty token sequence");
  return cfg_.arch == Arch::Cnn ? cnn_forward(ids).repr : lstm_forward(ids).repr;
}

template <typename S>
Eigen::VectorXd TextModelT<S>::represent(const std::vector<Token>& tokens) const {
  return represent_ids(to_ids(tokens)).template cast<double>();
}

template <typename S>
Eigen::VectorXd TextModelT<S>::decide(const Eigen::VectorXd& repr) const {
  if (repr.size() != cfg_.repr_dim()) throw Error("decide: representation size mismatch");
  return (params_.heads.template cast<double>()) * repr;
}

template <typename S>
double TextModelT<S>::example_loss(const std::vector<int>& ids, int gold, Blocks* grads,
                                   Rng* dropout_rng, double dropout) const {
  if (ids.empty()) throw Error("example_loss: empty token sequence");
  if (gold < 0 || gold >= static_cast<int>(labels_.size()))
    throw Error("example_loss: gold label out of range");

  CnnFwd cf;
  LstmFwd lf;
  Vec repr;
  if (cfg_.arch == Arch::Cnn) {
    cf = cnn_forward(ids);
    repr = cf.repr;
  } else {
    lf = lstm_forward(ids);
    repr = lf.repr;
  }

  Vec mask;
  if (dropout_rng && dropout > 0) {
    mask.resize(repr.size());
    const S keep_scale = static_cast<S>(1.0 / (1.0 - dropout));
    for (Eigen::Index k = 0; k < mask.size(); ++k)
      mask[k] = dropout_rng->next_real() < dropout ? S(0) : keep_scale;
    repr = repr.cwiseProduct(mask);
  }

  Vec scores = params_.heads * repr;
  const S smax = scores.maxCoeff();
  const S lse = smax + std::log((scores.array() - smax).exp().sum());
  const double loss = static_cast<double>(lse - scores[gold]);
  if (!grads) return loss;

  Vec dscore = (scores.array() - lse).exp().matrix();  // softmax
  dscore[gold] -= S(1);

  grads->heads += dscore * repr.transpose();
  Vec drepr = params_.heads.transpose() * dscore;
  if (mask.size() > 0) drepr = drepr.cwiseProduct(mask);

  const int e = cfg_.emb_dim;
  const int n0 = static_cast<int>(ids.size());

  if (cfg_.arch == Arch::Cnn) {
    const int nf = cfg_.filters_per_window;
    Mat dxt = Mat::Zero(cf.xt.rows(), cf.xt.cols());
    for (size_t wi = 0; wi < cfg_.windows.size(); ++wi) {
      const int w = cfg_.windows[wi];
      for (int k = 0; k < nf; ++k) {
        const S g = drepr[static_cast<Eigen::Index>(wi) * nf + k];
        if (g == S(0)) continue;
        const int p = cf.best[wi][k];
        const S a = cf.pooled[wi][k];
        const S da = g * (S(1) - a * a);
        Eigen::Map<const Vec> win(cf.xt.data() + static_cast<ptrdiff_t>(p) * e, w * e);
        grads->conv_w[wi].row(k) += da * win.transpose();
        grads->conv_b[wi](k, 0) += da;
        Eigen::Map<Vec>(dxt.data() + static_cast<ptrdiff_t>(p) * e, w * e) +=
            da * params_.conv_w[wi].row(k).transpose();
      }
    }
    for (int i = 0; i < n0; ++i) grads->embed.row(ids[i]) += dxt.col(i).transpose();
  } else {
    const int H = cfg_.lstm_hidden;
    const int n = n0;
    Vec dh = drepr;
    Vec dc = Vec::Zero(H);
    for (int t = n - 1; t >= 0; --t) {
      Vec c_prev = t > 0 ? Vec(lf.c.col(t - 1)) : Vec(Vec::Zero(H));
      Vec d_o = dh.cwiseProduct(lf.tc.col(t));
      dc += dh.cwiseProduct(lf.go.col(t))
                .cwiseProduct((S(1) - lf.tc.col(t).array().square()).matrix());
      Vec d_i = dc.cwiseProduct(lf.gg.col(t));
      Vec d_g = dc.cwiseProduct(lf.gi.col(t));
      Vec d_f = dc.cwiseProduct(c_prev);
      Vec dc_prev = dc.cwiseProduct(lf.gf.col(t));

      Vec dz(4 * H);
      dz.segment(0, H) =
          d_i.cwiseProduct(lf.gi.col(t)).cwiseProduct((S(1) - lf.gi.col(t).array()).matrix());
      dz.segment(H, H) =
          d_f.cwiseProduct(lf.gf.col(t)).cwiseProduct((S(1) - lf.gf.col(t).array()).matrix());
      dz.segment(2 * H, H) =
          d_g.cwiseProduct((S(1) - lf.gg.col(t).array().square()).matrix());
      dz.segment(3 * H, H) =
          d_o.cwiseProduct(lf.go.col(t)).cwiseProduct((S(1) - lf.go.col(t).array()).matrix());

      grads->wx += dz * lf.x.col(t).transpose();
      grads->wh += dz * lf.h.col(t).transpose();
      grads->lstm_b.col(0) += dz;
      grads->embed.row(ids[t]) += (params_.wx.transpose() * dz).transpose();
      dh = params_.wh.transpose() * dz;
      dc = dc_prev;
    }
  }
  return loss;
}

template <typename S>
double TextModelT<S>::accuracy(const std::vector<Example>& split, bool suppress_aug) const {
  if (split.empty()) return 0.0;
  int correct = 0;
  for (const auto& e : split) {
    Eigen::VectorXd s = decide(represent_ids(to_ids(e.tokens)).template cast<double>());
    int pred = argmax_label(s, labels_, suppress_aug);
    if (pred == labels_.index_of(e.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(split.size());
}

template <typename S>
TrainHistory TextModelT<S>::train(const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.train.empty()) throw Error("train: empty train split");
  for (const auto* split : {&data.train, &data.dev})
    for (const auto& e : *split)
      if (labels_.index_of(e.label) < 0)
        throw Error("train: example " + e.id + " label '" + e.label + "' has no decision head");

  const size_t n = data.train.size();
  std::vector<std::vector<int>> ids(n);
  std::vector<int> gold(n);
  for (size_t i = 0; i < n; ++i) {
    ids[i] = to_ids(data.train[i].tokens);
    if (static_cast<int>(ids[i].size()) > config.max_seq_len)
      ids[i].resize(config.max_seq_len);
    gold[i] = labels_.index_of(data.train[i].label);
  }

  Rng rng(mix_seed(config.seed, "train"));
  AdamT<S> adam(params_);
  Blocks grads = Blocks::zeros_like(params_);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  TrainHistory history;
  Blocks best_params = params_;
  double best_acc = -1.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0;
    int batch_index = 0;
    for (size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const size_t stop = std::min(n, start + config.batch_size);
      grads.set_zero();
      double batch_loss = 0;
      for (size_t k = start; k < stop; ++k)
        batch_loss += example_loss(ids[order[k]], gold[order[k]], &grads,
                                   config.dropout > 0 ? &rng : nullptr, config.dropout);
      if (!std::isfinite(batch_loss))
        throw Error("train: non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                    std::to_string(batch_index));
      loss_sum += batch_loss;
      const S scale = static_cast<S>(1.0 / static_cast<double>(stop - start));
      for (auto* g : grads.blocks())
        if (g->size() > 0) *g *= scale;
      if (config.freeze_embeddings)
        grads.embed.setZero();
      else
        grads.embed.row(0).setZero();  // <pad> stays the zero vector
      adam.step(params_, grads, config.learning_rate);
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.dev_accuracy = accuracy(data.dev.empty() ? data.train : data.dev, false);
    history.epochs.push_back(stats);
    if (stats.dev_accuracy > best_acc) {
      best_acc = stats.dev_accuracy;
      best_params = params_;
      history.best_epoch = epoch;
    }
  }
  params_ = std::move(best_params);
  return history;
}

template <typename S>
double TextModelT<S>::grad_check(const std::vector<Token>& tokens, const std::string& gold,
                                 double epsilon, const char* block_filter) const {
  if constexpr (!std::is_same_v<S, double>) {
    throw Error("grad_check requires 64-bit precision");
  } else {
    const int gold_idx = labels_.index_of(gold);
    if (gold_idx < 0) throw Error("grad_check: unknown label " + gold);
    const std::vector<int> ids = to_ids(tokens);

    Blocks analytic = Blocks::zeros_like(params_);
    example_loss(ids, gold_idx, &analytic);

    TextModelT probe(*this);
    auto pb = probe.params_.blocks();
    auto ab = analytic.blocks();
    auto names = probe.params_.block_names();
    double max_err = 0;
    for (size_t b = 0; b < pb.size(); ++b) {
      if (block_filter && names[b] != block_filter) continue;
      Mat& P = *pb[b];
      const Mat& A = *ab[b];
      const bool is_embed = pb[b] == &probe.params_.embed;
      for (Eigen::Index j = 0; j < P.cols(); ++j) {
        for (Eigen::Index i = 0; i < P.rows(); ++i) {
          if (is_embed && i == 0) continue;  // frozen pad row
          const double saved = P(i, j);
          P(i, j) = saved + epsilon;
          const double lp = probe.example_loss(ids, gold_idx);
          P(i, j) = saved - epsilon;
          const double lm = probe.example_loss(ids, gold_idx);
          P(i, j) = saved;
          const double gn = (lp - lm) / (2 * epsilon);
          const double ga = A(i, j);
          const double err = std::abs(ga - gn) / std::max({std::abs(ga), std::abs(gn), 1e-8});
          max_err = std::max(max_err, err);
        }
      }
    }
    return max_err;
  }
}

template <typename S>
TextModelT<double> TextModelT<S>::to_double() const {
  return TextModelT<double>(cfg_, labels_, vocab_, params_.template cast<double>());
}

template struct ParamBlocksT<float>;
template struct ParamBlocksT<double>;
template class TextModelT<float>;
template class TextModelT<double>;

namespace {

constexpr char kCkptMagic[4] = {'S', 'A', 'C', 'K'};
constexpr uint32_t kCkptVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(std::string("checkpoint: truncated ") + what);
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  auto len = get<uint32_t>(in, "string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw Error("checkpoint: truncated string");
  return s;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put<uint64_t>(out, static_cast<uint64_t>(m.rows()));
  put<uint64_t>(out, static_cast<uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put<double>(out, m(i, j));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
  auto rows = get<uint64_t>(in, "matrix rows");
  auto cols = get<uint64_t>(in, "matrix cols");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get<double>(in, "matrix entry");
  return m;
}

}  // namespace

void save_checkpoint(const TextModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const auto& cfg = model.config();
  out.write(kCkptMagic, 4);
  put<uint32_t>(out, kCkptVersion);
  put<uint8_t>(out, cfg.arch == Arch::Cnn ? 0 : 1);
  put<int32_t>(out, cfg.emb_dim);
  put<uint32_t>(out, static_cast<uint32_t>(cfg.windows.size()));
  for (int w : cfg.windows) put<int32_t>(out, w);
  put<int32_t>(out, cfg.filters_per_window);
  put<int32_t>(out, cfg.lstm_hidden);
  const auto& labels = model.labels();
  put<uint32_t>(out, static_cast<uint32_t>(labels.base.size()));
  for (const auto& l : labels.base) put_string(out, l);
  put<uint8_t>(out, labels.has_aug() ? 1 : 0);
  if (labels.has_aug()) put_string(out, *labels.aug);
  put<uint64_t>(out, model.vocab().hash());
  const auto& p = model.params();
  put_matrix(out, p.embed);
  put<uint32_t>(out, static_cast<uint32_t>(p.conv_w.size()));
  for (const auto& m : p.conv_w) put_matrix(out, m);
  for (const auto& m : p.conv_b) put_matrix(out, m);
  put_matrix(out, p.wx);
  put_matrix(out, p.wh);
  put_matrix(out, p.lstm_b);
  put_matrix(out, p.heads);
  if (!out) throw Error("checkpoint: write failed for " + path);
}

TextModel load_checkpoint(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw Error(path + ": not a model checkpoint");
  if (get<uint32_t>(in, "version") != kCkptVersion)
    throw Error(path + ": unsupported checkpoint version");
  ModelConfig cfg;
  cfg.arch = get<uint8_t>(in, "arch") == 0 ? Arch::Cnn : Arch::Rnn;
  cfg.emb_dim = get<int32_t>(in, "emb_dim");
  cfg.windows.clear();
  auto nw = get<uint32_t>(in, "window count");
  for (uint32_t i = 0; i < nw; ++i) cfg.windows.push_back(get<int32_t>(in, "window"));
  cfg.filters_per_window = get<int32_t>(in, "filters");
  cfg.lstm_hidden = get<int32_t>(in, "hidden");
  LabelSet labels;
  auto nb = get<uint32_t>(in, "base label count");
  for (uint32_t i = 0; i < nb; ++i) labels.base.push_back(get_string(in));
  if (get<uint8_t>(in, "aug flag")) labels.aug = get_string(in);
  auto stored_hash = get<uint64_t>(in, "vocab hash");
  if (stored_hash != vocab.hash())
    throw Error(path + ": vocabulary hash mismatch (checkpoint was trained on a different vocab)");
  ParamBlocksT<double> p;
  p.embed = get_matrix(in);
  auto ncw = get<uint32_t>(in, "conv block count");
  for (uint32_t i = 0; i < ncw; ++i) p.conv_w.push_back(get_matrix(in));
  for (uint32_t i = 0; i < ncw; ++i) p.conv_b.push_back(get_matrix(in));
  p.wx = get_matrix(in);
  p.wh = get_matrix(in);
  p.lstm_b = get_matrix(in);
  p.heads = get_matrix(in);
  if (p.embed.rows() != static_cast<Eigen::Index>(vocab.size()))
    throw Error(path + ": embedding rows do not match vocabulary size");
  return TextModel(cfg, labels, vocab, std::move(p));
}

std::pair<TextModel, TrainHistory> train_classifier(const Dataset& data,
                                                    const ModelConfig& model_config,
                                                    const TrainConfig& train_config,
                                                    const Vocabulary& vocab,
                                                    const EmbeddingTable* init_embeddings) {
  if (train_config.precision == Precision::F32) {
    TextModelT<float> m(model_config, data.labels, vocab, init_embeddings, train_config.seed);
    TrainHistory h = m.train(data, train_config);
    return {m.to_double(), std::move(h)};
  }
  TextModel m(model_config, data.labels, vocab, init_embeddings, train_config.seed);
  TrainHistory h = m.train(data, train_config);
  return {std::move(m), std::move(h)};
}

}  // namespace sentaug
