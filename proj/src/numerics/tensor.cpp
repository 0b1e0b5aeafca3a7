#include "kiwi/numerics/tensor.hpp"

#include <cmath>

#include "kiwi/common.hpp"

namespace kiwi::numerics {

namespace {
bool g_debug_checks = false;

size_t shape_product(const std::vector<size_t>& shape) {
  if (shape.empty()) throw NumericsError("tensor shape must be non-empty");
  size_t n = 1;
  for (size_t d : shape) {
    if (d == 0) throw NumericsError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}
}  // namespace

void set_debug_checks(bool enabled) { g_debug_checks = enabled; }
bool debug_checks() { return g_debug_checks; }

Tensor::Tensor(std::vector<size_t> shape)
    : shape_(std::move(shape)), values_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_product(shape_)) {
    throw NumericsError(
        strformat("tensor value count %zu does not match shape product %zu",
                  values_.size(), shape_product(shape_)));
  }
  if (g_debug_checks) check_finite("tensor construction");
}

void Tensor::ensure_grad() {
  if (grad_.empty()) grad_.assign(values_.size(), 0.0);
}

void Tensor::zero_grad() { grad_.assign(values_.size(), 0.0); }

void Tensor::check_finite(const char* context) const {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw NumericsError(strformat("non-finite value in %s%s%s", context,
                                    name.empty() ? "" : " for ",
                                    name.c_str()));
    }
  }
}

TensorPtr make_parameter(std::string name, std::vector<size_t> shape,
                         size_t fan_in, UniformSampler& rng) {
  double k = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
  auto t = make_tensor(std::move(shape));
  for (double& v : t->values()) v = rng.next(-k, k);
  t->requires_grad = true;
  t->name = std::move(name);
  return t;
}

}  // namespace kiwi::numerics
