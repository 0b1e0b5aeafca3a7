#pragma once

#include <functional>
#include <vector>

#include "kiwi/numerics/graph.hpp"

namespace kiwi::numerics {

struct GradCheckOptions {
  int samples_per_param = 10;  // coordinates sampled per parameter tensor
  double step = 1e-5;          // central-difference step
  uint64_t seed = 7;           // coordinate sampling seed
};

// Compares analytic gradients of build_loss against central finite
// differences and returns the max over sampled coordinates of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// The builder must be deterministic: it is evaluated twice at the base
// point and a bitwise difference raises NumericsError.
double grad_check(const std::function<TensorPtr(Graph&)>& build_loss,
                  const std::vector<TensorPtr>& params,
                  const GradCheckOptions& options = {});

}  // namespace kiwi::numerics
