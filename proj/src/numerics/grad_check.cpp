#include "kiwi/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "kiwi/common.hpp"

namespace kiwi::numerics {

double grad_check(const std::function<TensorPtr(Graph&)>& build_loss,
                  const std::vector<TensorPtr>& params,
                  const GradCheckOptions& options) {
  auto evaluate = [&]() -> double {
    Graph g;
    TensorPtr loss = build_loss(g);
    if (!loss->is_scalar())
      throw NumericsError("grad_check: loss must be a scalar");
    return loss->value();
  };

  const double base1 = evaluate();
  const double base2 = evaluate();
  if (std::memcmp(&base1, &base2, sizeof(double)) != 0)
    throw NumericsError(
        "grad_check: graph builder is not deterministic "
        "(two forward passes differ)");

  Graph g;
  TensorPtr loss = build_loss(g);
  g.register_parameters(params);
  g.backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p->grad());

  UniformSampler rng(options.seed);
  const double h = options.step;
  double max_rel = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = *params[pi];
    const size_t n = p.size();
    // Sample without replacement when the tensor is small enough.
    std::vector<size_t> coords;
    if (n <= static_cast<size_t>(options.samples_per_param)) {
      coords.resize(n);
      for (size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (int s = 0; s < options.samples_per_param; ++s)
        coords.push_back(static_cast<size_t>(rng.next_index(n)));
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }
    for (size_t i : coords) {
      const double saved = p.values()[i];
      p.values()[i] = saved + h;
      const double up = evaluate();
      p.values()[i] = saved - h;
      const double down = evaluate();
      p.values()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[pi][i];
      const double rel =
          std::fabs(a - numeric) /
          std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace kiwi::numerics
