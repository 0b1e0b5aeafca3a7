#pragma once

#include <unordered_map>

#include "kiwi/ensemble/ensemble.hpp"

namespace kiwi::ensemble {

struct StackerOptions {
  double l2 = 1e-3;               // regularization strength (bias excluded)
  double gradient_tolerance = 1e-6;
  size_t max_iterations = 5000;
};

// L2-regularized logistic regression over sparse feature rows, minimized
// by full-batch gradient descent with backtracking line search. Produces
// word-level labels for the MT stream only.
class LinearStacker {
 public:
  explicit LinearStacker(StackerOptions options = {}) : options_(options) {}

  // Gold tags are flattened per token; rows and tags must align. Throws on
  // an empty feature set or single-class training data.
  void train(const std::vector<FeatureRow>& rows, const TagVector& tags);

  // BAD probability for one token.
  double predict_prob(const FeatureRow& row) const;
  Tag predict(const FeatureRow& row, double threshold = 0.5) const;

  // Objective value and gradient at the given weights (bias last); exposed
  // so descent behavior is testable.
  struct Objective {
    double value;
    std::vector<double> gradient;
  };
  Objective objective(const std::vector<double>& weights) const;

  size_t feature_count() const { return feature_index_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  double score(const FeatureRow& row) const;

  StackerOptions options_;
  std::unordered_map<std::string, size_t> feature_index_;
  std::vector<double> weights_;
  double bias_ = 0.0;

  // Training data in indexed form, kept for objective().
  std::vector<std::vector<std::pair<size_t, double>>> indexed_rows_;
  std::vector<double> labels_;  // +1 BAD, -1 OK
};

// Stacking only produces MT-word labels; building a stacker dataset for
// any other stream is an error.
std::vector<FeatureRow> build_stacker_rows(
    const std::vector<data::QESample>& samples,
    const std::vector<SystemPrediction>& systems, Stream stream);

}  // namespace kiwi::ensemble
