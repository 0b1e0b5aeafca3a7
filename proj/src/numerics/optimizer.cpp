#include "kiwi/numerics/optimizer.hpp"

#include <cmath>

#include "kiwi/common.hpp"

namespace kiwi::numerics {

Optimizer Optimizer::sgd(double learning_rate) {
  if (learning_rate <= 0.0)
    throw NumericsError("sgd: learning rate must be positive");
  return Optimizer("sgd", learning_rate);
}

Optimizer Optimizer::adam(double learning_rate, double beta1, double beta2,
                          double epsilon) {
  if (learning_rate <= 0.0)
    throw NumericsError("adam: learning rate must be positive");
  Optimizer opt("adam", learning_rate);
  opt.beta1_ = beta1;
  opt.beta2_ = beta2;
  opt.epsilon_ = epsilon;
  return opt;
}

void Optimizer::step(const std::vector<TensorPtr>& params) {
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  for (const auto& p : params) {
    if (!p->has_grad())
      throw NumericsError(strformat(
          "optimizer: missing gradient for parameter '%s'",
          p->name.empty() ? "<unnamed>" : p->name.c_str()));
    const auto& g = p->grad();
    auto& v = p->values();
    if (kind_ == "sgd") {
      for (size_t i = 0; i < v.size(); ++i) v[i] -= learning_rate_ * g[i];
    } else {
      auto& mom = moments_[p.get()];
      if (mom.m.empty()) {
        mom.m.assign(v.size(), 0.0);
        mom.v.assign(v.size(), 0.0);
      }
      const double bc1 = 1.0 - std::pow(beta1_, t);
      const double bc2 = 1.0 - std::pow(beta2_, t);
      for (size_t i = 0; i < v.size(); ++i) {
        mom.m[i] = beta1_ * mom.m[i] + (1.0 - beta1_) * g[i];
        mom.v[i] = beta2_ * mom.v[i] + (1.0 - beta2_) * g[i] * g[i];
        const double mhat = mom.m[i] / bc1;
        const double vhat = mom.v[i] / bc2;
        v[i] -= learning_rate_ * mhat / (std::sqrt(vhat) + epsilon_);
      }
    }
    p->zero_grad();
  }
}

double clip_global_norm(const std::vector<TensorPtr>& params,
                        double max_norm) {
  double total = 0.0;
  for (const auto& p : params) {
    if (!p->has_grad()) continue;
    for (double g : p->grad()) total += g * g;
  }
  const double norm = std::sqrt(total);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto& p : params) {
      if (!p->has_grad()) continue;
      for (double& g : p->grad()) g *= scale;
    }
  }
  return norm;
}

}  // namespace kiwi::numerics
