#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sentaug/corpus.hpp"

namespace sentaug {

// Read-only view of a trained classifier; explain/attack depend on this
// instead of a concrete architecture so tests can plug in toy models.
class Classifier {
 public:
  virtual ~Classifier() = default;

  // Text representation f(x).
  virtual Eigen::VectorXd represent(const std::vector<Token>& tokens) const = 0;
  // Decision scores h(x, y) = u_y . f(x), one per label in labels().all().
  virtual Eigen::VectorXd decide(const Eigen::VectorXd& repr) const = 0;
  virtual const LabelSet& labels() const = 0;

  Eigen::VectorXd scores(const std::vector<Token>& tokens) const {
    return decide(represent(tokens));
  }
};

// Numerically stable softmax; components sum to 1.
Eigen::VectorXd softmax(const Eigen::VectorXd& scores);

// Argmax over base labels (suppress_aug) or the full set; ties go to the
// first label in declared order. Returns an index into labels.all().
int argmax_label(const Eigen::VectorXd& scores, const LabelSet& labels, bool suppress_aug);

std::string predict_label(const Classifier& model, const std::vector<Token>& tokens,
                          bool suppress_aug);

// Softmax probability of base label `base_index`, taken over base labels only.
double base_label_probability(const Eigen::VectorXd& scores, const LabelSet& labels,
                              int base_index);

}  // namespace sentaug
