#include "kiwi/ensemble/stacker.hpp"

#include <cmath>

namespace kiwi::ensemble {

namespace {

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  if (margin > 0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

void LinearStacker::train(const std::vector<FeatureRow>& rows,
                          const TagVector& tags) {
  if (rows.size() != tags.size())
    throw DataError("stacker: feature rows and tags differ in length");
  if (rows.empty()) throw DataError("stacker: empty training set");

  size_t n_bad = 0;
  for (Tag t : tags) n_bad += t == Tag::BAD ? 1 : 0;
  if (n_bad == 0 || n_bad == tags.size())
    throw DataError("stacker: training data contains a single class");

  feature_index_.clear();
  indexed_rows_.clear();
  indexed_rows_.reserve(rows.size());
  size_t nonzero = 0;
  for (const auto& row : rows) {
    std::vector<std::pair<size_t, double>> indexed;
    indexed.reserve(row.size());
    for (const auto& [name, value] : row) {
      auto [it, inserted] =
          feature_index_.emplace(name, feature_index_.size());
      indexed.emplace_back(it->second, value);
      ++nonzero;
    }
    indexed_rows_.push_back(std::move(indexed));
  }
  if (feature_index_.empty() || nonzero == 0)
    throw DataError("stacker: empty feature set");

  labels_.clear();
  labels_.reserve(tags.size());
  for (Tag t : tags) labels_.push_back(t == Tag::BAD ? 1.0 : -1.0);

  // Weights plus bias in one vector; bias is the last entry.
  std::vector<double> w(feature_index_.size() + 1, 0.0);
  Objective obj = objective(w);
  for (size_t iter = 0; iter < options_.max_iterations; ++iter) {
    double grad_norm = 0.0;
    for (double g : obj.gradient) grad_norm += g * g;
    grad_norm = std::sqrt(grad_norm);
    if (grad_norm <= options_.gradient_tolerance) break;

    // Backtracking line search with the Armijo condition.
    double step = 1.0;
    const double slope = -grad_norm * grad_norm;
    std::vector<double> candidate(w.size());
    Objective next;
    for (int tries = 0; tries < 60; ++tries) {
      for (size_t i = 0; i < w.size(); ++i)
        candidate[i] = w[i] - step * obj.gradient[i];
      next = objective(candidate);
      if (next.value <= obj.value + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    w = candidate;
    obj = std::move(next);
  }

  weights_.assign(w.begin(), w.end() - 1);
  bias_ = w.back();
}

LinearStacker::Objective LinearStacker::objective(
    const std::vector<double>& weights) const {
  if (weights.size() != feature_index_.size() + 1)
    throw DataError("stacker objective: wrong weight vector size");
  const size_t n = indexed_rows_.size();
  const size_t dim = weights.size();
  Objective obj{0.0, std::vector<double>(dim, 0.0)};
  for (size_t r = 0; r < n; ++r) {
    double s = weights[dim - 1];
    for (const auto& [idx, val] : indexed_rows_[r]) s += weights[idx] * val;
    const double y = labels_[r];
    obj.value += logistic_loss(y * s);
    // d/ds log(1+exp(-ys)) = -y * sigmoid(-ys)
    const double coeff = -y * sigmoid(-y * s) / static_cast<double>(n);
    for (const auto& [idx, val] : indexed_rows_[r])
      obj.gradient[idx] += coeff * val;
    obj.gradient[dim - 1] += coeff;
  }
  obj.value /= static_cast<double>(n);
  for (size_t i = 0; i + 1 < dim; ++i) {
    obj.value += 0.5 * options_.l2 * weights[i] * weights[i];
    obj.gradient[i] += options_.l2 * weights[i];
  }
  return obj;
}

double LinearStacker::score(const FeatureRow& row) const {
  double s = bias_;
  for (const auto& [name, value] : row) {
    auto it = feature_index_.find(name);
    if (it == feature_index_.end()) continue;  // unseen feature
    s += weights_[it->second] * value;
  }
  return s;
}

double LinearStacker::predict_prob(const FeatureRow& row) const {
  return sigmoid(score(row));
}

Tag LinearStacker::predict(const FeatureRow& row, double threshold) const {
  return predict_prob(row) >= threshold ? Tag::BAD : Tag::OK;
}

std::vector<FeatureRow> build_stacker_rows(
    const std::vector<data::QESample>& samples,
    const std::vector<SystemPrediction>& systems, Stream stream) {
  if (stream != Stream::Mt)
    throw ConfigError("the stacked ensemble only produces MT word labels; "
                      "stream '" + stream_name(stream) + "' is not supported");
  std::vector<FeatureRow> rows;
  for (size_t s = 0; s < samples.size(); ++s)
    for (size_t t = 0; t < samples[s].mt.size(); ++t)
      rows.push_back(extract_features(samples[s], t, systems, s));
  return rows;
}

}  // namespace kiwi::ensemble
