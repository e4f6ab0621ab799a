#include "sentaug/classifier.hpp"

namespace sentaug {

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  double m = scores.maxCoeff();
  Eigen::VectorXd e = (scores.array() - m).exp();
  return e / e.sum();
}

int argmax_label(const Eigen::VectorXd& scores, const LabelSet& labels, bool suppress_aug) {
  int limit = suppress_aug ? static_cast<int>(labels.base.size())
                           : static_cast<int>(labels.size());
  if (scores.size() < limit) throw Error("argmax_label: score/label size mismatch");
  int best = 0;
  for (int i = 1; i < limit; ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

std::string predict_label(const Classifier& model, const std::vector<Token>& tokens,
                          bool suppress_aug) {
  int idx = argmax_label(model.scores(tokens), model.labels(), suppress_aug);
  return model.labels().all()[idx];
}

double base_label_probability(const Eigen::VectorXd& scores, const LabelSet& labels,
                              int base_index) {
  int nb = static_cast<int>(labels.base.size());
  if (base_index < 0 || base_index >= nb) throw Error("base_label_probability: bad index");
  Eigen::VectorXd p = softmax(scores.head(nb));
  return p[base_index];
}

}  // namespace sentaug
