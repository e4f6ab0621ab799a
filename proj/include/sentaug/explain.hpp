#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sentaug/classifier.hpp"
#include "sentaug/corpus.hpp"

namespace sentaug {

enum class ExplainMethod { Lime, CosSim };

std::string explain_method_to_string(ExplainMethod m);
ExplainMethod explain_method_from_string(const std::string& s);

struct PerturbationSet {
  std::vector<std::vector<uint8_t>> masks;  // q masks, 1 = token kept
};

// Per sample the deletion count is uniform in {0, ..., n-1}, then a uniform
// random subset of that size is dropped; every mask keeps >= 1 token.
PerturbationSet sample_perturbations(const std::vector<Token>& tokens, int q, uint64_t seed);

std::vector<Token> apply_mask(const std::vector<Token>& tokens, const std::vector<uint8_t>& mask);

// exp(-dist^2 / sigma^2) with dist = 1 - cosine(repr_x, repr_z); a zero
// repr_z counts as distance 1.
double proximity(const Eigen::VectorXd& repr_x, const Eigen::VectorXd& repr_z, double sigma2);

struct LimeConfig {
  int q = 600;
  double sigma2 = 10.0;
  int epochs = 50;
  double learning_rate = 0.0;  // <= 0: automatic step from a curvature bound
  double ridge = 1e-4;
  uint64_t seed = 1;
};

struct LimeSurrogate {
  Eigen::MatrixXd weights;     // |labels| x n token-position weights
  Eigen::VectorXd intercepts;  // per label
  double sigma2 = 0;
  double final_loss = 0;      // full weighted objective incl. ridge
  double final_residual = 0;  // weighted data term only
};

// Fits one weighted ridge surrogate per label to the raw decision scores of
// the masked inputs. Production solver is full-batch gradient descent;
// the closed-form solve below is the test oracle.
LimeSurrogate fit_lime(const Classifier& model, const std::vector<Token>& tokens,
                       const LimeConfig& config);

// As fit_lime but on caller-provided masks (e.g. a full 2^n enumeration).
LimeSurrogate fit_lime_with_masks(const Classifier& model, const std::vector<Token>& tokens,
                                  const std::vector<std::vector<uint8_t>>& masks,
                                  const LimeConfig& config);

// Closed-form weighted-ridge solution on the same system; test oracle for the
// gradient-descent path.
LimeSurrogate fit_lime_closed_form(const Classifier& model, const std::vector<Token>& tokens,
                                   const std::vector<std::vector<uint8_t>>& masks,
                                   const LimeConfig& config);

struct Keyword {
  std::string token;  // normalized form
  int position = 0;
  double weight = 0;
};

struct Explanation {
  std::string example_id;
  ExplainMethod method = ExplainMethod::Lime;
  std::string model_tag;
  std::string prediction;
  std::string gold;
  std::vector<Keyword> keywords;  // weights non-increasing
};

// Top-t positions of the surrogate weight vector for the predicted label;
// ties broken by position order.
Explanation explain_lime(const LimeSurrogate& surrogate, const LabelSet& labels,
                         const std::string& predicted, int t, const std::vector<Token>& tokens);

// Ranks tokens by cosine similarity between f(x) and the single-word
// representation f([x_i]).
Explanation explain_cossim(const Classifier& model, const std::vector<Token>& tokens, int t);

// Line-delimited JSON records {id, method, model, prediction, gold, keywords}.
void write_explanations(const std::string& path, const std::vector<Explanation>& explanations);
std::vector<Explanation> read_explanations(const std::string& path);

}  // namespace sentaug
