#include "sentaug/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sentaug/embeddings.hpp"
#include "sentaug/rng.hpp"

namespace sentaug {

std::string explain_method_to_string(ExplainMethod m) {
  return m == ExplainMethod::Lime ? "lime" : "cossim";
}

ExplainMethod explain_method_from_string(const std::string& s) {
  if (s == "lime") return ExplainMethod::Lime;
  if (s == "cossim") return ExplainMethod::CosSim;
  throw Error("unknown explanation method '" + s + "'");
}

PerturbationSet sample_perturbations(const std::vector<Token>& tokens, int q, uint64_t seed) {
  if (q < 1) throw Error("sample_perturbations: q must be >= 1");
  if (tokens.empty()) throw Error("sample_perturbations: empty token sequence");
  const size_t n = tokens.size();
  Rng rng(mix_seed(seed, "lime-perturb"));
  PerturbationSet set;
  set.masks.reserve(q);
  std::vector<int> positions(n);
  for (size_t i = 0; i < n; ++i) positions[i] = static_cast<int>(i);
  for (int s = 0; s < q; ++s) {
    const auto drop = static_cast<size_t>(rng.next_below(n));  // 0 .. n-1 deletions
    rng.shuffle(positions);
    std::vector<uint8_t> mask(n, 1);
    for (size_t k = 0; k < drop; ++k) mask[positions[k]] = 0;
    set.masks.push_back(std::move(mask));
  }
  return set;
}

std::vector<Token> apply_mask(const std::vector<Token>& tokens,
                              const std::vector<uint8_t>& mask) {
  if (mask.size() != tokens.size()) throw Error("apply_mask: mask length mismatch");
  std::vector<Token> out;
  for (size_t i = 0; i < tokens.size(); ++i)
    if (mask[i]) out.push_back(tokens[i]);
  return out;
}

double proximity(const Eigen::VectorXd& repr_x, const Eigen::VectorXd& repr_z, double sigma2) {
  if (repr_x.size() != repr_z.size()) throw Error("proximity: size mismatch");
  if (repr_x.norm() == 0) throw Error("proximity: repr_x must be nonzero");
  double dist = repr_z.norm() == 0 ? 1.0 : 1.0 - cosine(repr_x, repr_z);
  return std::exp(-dist * dist / sigma2);
}

namespace {

// Weighted ridge system for one sentence: Phi = [z 1], A = Phi^T D Phi,
// c_y = Phi^T D h_y. Shared by the GD solver and the closed-form oracle.
struct LimeSystem {
  Eigen::MatrixXd a;        // (n+1) x (n+1)
  Eigen::MatrixXd targets;  // (n+1) x L, column y = Phi^T D h_y
  Eigen::MatrixXd h;        // q x L raw decision scores
  Eigen::VectorXd d;        // proximity weights
};

LimeSystem build_system(const Classifier& model, const std::vector<Token>& tokens,
                        const std::vector<std::vector<uint8_t>>& masks, double sigma2) {
  const auto n = static_cast<Eigen::Index>(tokens.size());
  const auto q = static_cast<Eigen::Index>(masks.size());
  const auto L = static_cast<Eigen::Index>(model.labels().size());
  Eigen::VectorXd repr_x = model.represent(tokens);

  Eigen::MatrixXd phi(q, n + 1);
  LimeSystem sys;
  sys.h.resize(q, L);
  sys.d.resize(q);
  for (Eigen::Index s = 0; s < q; ++s) {
    const auto& mask = masks[s];
    if (static_cast<Eigen::Index>(mask.size()) != n)
      throw Error("fit_lime: mask length mismatch");
    std::vector<Token> sub = apply_mask(tokens, mask);
    if (sub.empty()) throw Error("fit_lime: mask keeps no token");
    Eigen::VectorXd repr_z = model.represent(sub);
    sys.d[s] = proximity(repr_x, repr_z, sigma2);
    sys.h.row(s) = model.decide(repr_z).transpose();
    for (Eigen::Index i = 0; i < n; ++i) phi(s, i) = mask[i] ? 1.0 : 0.0;
    phi(s, n) = 1.0;  // intercept
  }
  sys.a = phi.transpose() * sys.d.asDiagonal() * phi;
  sys.targets = phi.transpose() * sys.d.asDiagonal() * sys.h;
  return sys;
}

void fill_diagnostics(LimeSurrogate& fit, const LimeSystem& sys,
                      const std::vector<std::vector<uint8_t>>& masks, double ridge) {
  const auto n = fit.weights.cols();
  const auto L = fit.weights.rows();
  const auto q = static_cast<Eigen::Index>(masks.size());
  double residual = 0, penalty = 0;
  for (Eigen::Index y = 0; y < L; ++y) {
    for (Eigen::Index s = 0; s < q; ++s) {
      double g = fit.intercepts[y];
      for (Eigen::Index i = 0; i < n; ++i)
        if (masks[s][i]) g += fit.weights(y, i);
      const double r = sys.h(s, y) - g;
      residual += sys.d[s] * r * r;
    }
    penalty += ridge * fit.weights.row(y).squaredNorm();
  }
  fit.final_residual = residual;
  fit.final_loss = residual + penalty;
}

}  // namespace

LimeSurrogate fit_lime_with_masks(const Classifier& model, const std::vector<Token>& tokens,
                                  const std::vector<std::vector<uint8_t>>& masks,
                                  const LimeConfig& config) {
  if (tokens.empty()) throw Error("fit_lime: empty token sequence");
  if (masks.empty()) throw Error("fit_lime: no perturbation samples");
  if (config.epochs < 1) throw Error("fit_lime: epochs must be >= 1");
  const auto n = static_cast<Eigen::Index>(tokens.size());
  const auto L = static_cast<Eigen::Index>(model.labels().size());
  LimeSystem sys = build_system(model, tokens, masks, config.sigma2);

  // gradient of the quadratic objective: 2 (A theta - c) + 2 ridge [w; 0]
  double lr = config.learning_rate;
  if (lr <= 0) {
    double bound = config.ridge;  // Gershgorin bound on the Hessian spectrum
    for (Eigen::Index i = 0; i < sys.a.rows(); ++i)
      bound = std::max(bound, sys.a.row(i).cwiseAbs().sum() + config.ridge);
    lr = 0.5 / bound;
  }

  LimeSurrogate fit;
  fit.sigma2 = config.sigma2;
  fit.weights.setZero(L, n);
  fit.intercepts.setZero(L);
  for (Eigen::Index y = 0; y < L; ++y) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n + 1);
    const Eigen::VectorXd c = sys.targets.col(y);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      Eigen::VectorXd grad = 2.0 * (sys.a * theta - c);
      grad.head(n) += 2.0 * config.ridge * theta.head(n);
      theta -= lr * grad;
      if (!theta.allFinite())
        throw Error("fit_lime: diverged at epoch " + std::to_string(epoch));
    }
    fit.weights.row(y) = theta.head(n).transpose();
    fit.intercepts[y] = theta[n];
  }
  fill_diagnostics(fit, sys, masks, config.ridge);
  return fit;
}

LimeSurrogate fit_lime(const Classifier& model, const std::vector<Token>& tokens,
                       const LimeConfig& config) {
  PerturbationSet set = sample_perturbations(tokens, config.q, config.seed);
  return fit_lime_with_masks(model, tokens, set.masks, config);
}

LimeSurrogate fit_lime_closed_form(const Classifier& model, const std::vector<Token>& tokens,
                                   const std::vector<std::vector<uint8_t>>& masks,
                                   const LimeConfig& config) {
  if (tokens.empty()) throw Error("fit_lime: empty token sequence");
  if (masks.empty()) throw Error("fit_lime: no perturbation samples");
  const auto n = static_cast<Eigen::Index>(tokens.size());
  const auto L = static_cast<Eigen::Index>(model.labels().size());
  LimeSystem sys = build_system(model, tokens, masks, config.sigma2);

  Eigen::MatrixXd reg = Eigen::MatrixXd::Identity(n + 1, n + 1) * config.ridge;
  reg(n, n) = 0;  // intercept is not penalized
  Eigen::MatrixXd lhs = sys.a + reg;

  LimeSurrogate fit;
  fit.sigma2 = config.sigma2;
  fit.weights.resize(L, n);
  fit.intercepts.resize(L);
  Eigen::LDLT<Eigen::MatrixXd> solver(lhs);
  for (Eigen::Index y = 0; y < L; ++y) {
    Eigen::VectorXd theta = solver.solve(sys.targets.col(y));
    fit.weights.row(y) = theta.head(n).transpose();
    fit.intercepts[y] = theta[n];
  }
  fill_diagnostics(fit, sys, masks, config.ridge);
  return fit;
}

namespace {

std::vector<Keyword> top_positions(const std::vector<Token>& tokens,
                                   const Eigen::VectorXd& values, int t) {
  if (t < 1) throw Error("explanation size t must be >= 1");
  std::vector<int> order(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  const size_t keep = std::min<size_t>(t, tokens.size());
  std::vector<Keyword> out;
  out.reserve(keep);
  for (size_t k = 0; k < keep; ++k) {
    Keyword kw;
    kw.token = tokens[order[k]].norm;
    kw.position = order[k];
    kw.weight = values[order[k]];
    out.push_back(std::move(kw));
  }
  return out;
}

}  // namespace

Explanation explain_lime(const LimeSurrogate& surrogate, const LabelSet& labels,
                         const std::string& predicted, int t, const std::vector<Token>& tokens) {
  const int y = labels.index_of(predicted);
  if (y < 0) throw Error("explain_lime: unknown label " + predicted);
  if (surrogate.weights.cols() != static_cast<Eigen::Index>(tokens.size()))
    throw Error("explain_lime: surrogate/token length mismatch");
  Explanation e;
  e.method = ExplainMethod::Lime;
  e.prediction = predicted;
  e.keywords = top_positions(tokens, surrogate.weights.row(y).transpose(), t);
  return e;
}

Explanation explain_cossim(const Classifier& model, const std::vector<Token>& tokens, int t) {
  if (tokens.empty()) throw Error("explain_cossim: empty token sequence");
  Eigen::VectorXd repr_x = model.represent(tokens);
  Eigen::VectorXd sims(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    Eigen::VectorXd repr_i = model.represent({tokens[i]});
    sims[static_cast<Eigen::Index>(i)] = cosine(repr_x, repr_i);
  }
  Explanation e;
  e.method = ExplainMethod::CosSim;
  e.prediction = predict_label(model, tokens, true);
  e.keywords = top_positions(tokens, sims, t);
  return e;
}

void write_explanations(const std::string& path, const std::vector<Explanation>& explanations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& e : explanations) {
    nlohmann::json rec;
    rec["id"] = e.example_id;
    rec["method"] = explain_method_to_string(e.method);
    rec["model"] = e.model_tag;
    rec["prediction"] = e.prediction;
    rec["gold"] = e.gold;
    auto& kws = rec["keywords"] = nlohmann::json::array();
    for (const auto& k : e.keywords)
      kws.push_back({{"token", k.token}, {"position", k.position}, {"weight", k.weight}});
    out << rec.dump() << '\n';
  }
}

std::vector<Explanation> read_explanations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<Explanation> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(path + ":" + std::to_string(line_no) + ": bad record: " + ex.what());
    }
    Explanation e;
    e.example_id = rec.at("id").get<std::string>();
    e.method = explain_method_from_string(rec.at("method").get<std::string>());
    e.model_tag = rec.value("model", "");
    e.prediction = rec.at("prediction").get<std::string>();
    e.gold = rec.value("gold", "");
    for (const auto& k : rec.at("keywords")) {
      Keyword kw;
      kw.token = k.at("token").get<std::string>();
      kw.position = k.at("position").get<int>();
      kw.weight = k.at("weight").get<double>();
      e.keywords.push_back(std::move(kw));
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace sentaug
