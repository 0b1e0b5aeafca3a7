#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kiwi/numerics/tensor.hpp"

namespace kiwi::numerics {

// First-order parameter updates. step() applies the update to every tensor
// in the list, then clears (zero-fills) their gradients. The step counter
// increases by exactly 1 per call.
class Optimizer {
 public:
  static Optimizer sgd(double learning_rate);
  static Optimizer adam(double learning_rate, double beta1 = 0.9,
                        double beta2 = 0.999, double epsilon = 1e-8);

  void step(const std::vector<TensorPtr>& params);

  size_t step_count() const { return step_count_; }
  const std::string& kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }

 private:
  Optimizer(std::string kind, double lr) : kind_(std::move(kind)), learning_rate_(lr) {}

  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };

  std::string kind_;
  double learning_rate_;
  double beta1_ = 0.9, beta2_ = 0.999, epsilon_ = 1e-8;
  size_t step_count_ = 0;
  std::unordered_map<const Tensor*, Moments> moments_;
};

// Scales all gradients so their joint L2 norm does not exceed max_norm.
// Returns the pre-clip norm. Parameters without gradients are skipped.
double clip_global_norm(const std::vector<TensorPtr>& params, double max_norm);

}  // namespace kiwi::numerics
