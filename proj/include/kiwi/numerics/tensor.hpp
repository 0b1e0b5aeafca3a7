#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace kiwi::numerics {

// When enabled, tensor construction and every graph op validate that all
// produced values are finite and raise NumericsError otherwise.
void set_debug_checks(bool enabled);
bool debug_checks();

// Dense row-major tensor of doubles. Rank 0 is represented as shape {1}.
// The grad buffer stays empty until a backward pass touches the tensor.
class Tensor {
 public:
  Tensor() : shape_{1}, values_(1, 0.0) {}
  explicit Tensor(std::vector<size_t> shape);
  Tensor(std::vector<size_t> shape, std::vector<double> values);

  static Tensor scalar(double value) { return Tensor({1}, {value}); }

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t dim(size_t i) const { return shape_[i]; }
  size_t size() const { return values_.size(); }
  bool is_scalar() const { return values_.size() == 1; }

  // 2-D accessors; rows()/cols() treat a vector [n] as [1, n].
  size_t rows() const { return shape_.size() >= 2 ? shape_[0] : 1; }
  size_t cols() const { return shape_.size() >= 2 ? shape_[1] : shape_[0]; }
  double& at(size_t r, size_t c) { return values_[r * cols() + c]; }
  double at(size_t r, size_t c) const { return values_[r * cols() + c]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double value() const { return values_[0]; }

  bool requires_grad = false;

  std::vector<double>& grad() { return grad_; }
  const std::vector<double>& grad() const { return grad_; }
  bool has_grad() const { return !grad_.empty(); }
  void ensure_grad();  // allocates (zero-filled) if absent
  void zero_grad();    // allocates if absent, then zero-fills
  void clear_grad() { grad_.clear(); }

  // Parameter name; empty for intermediates. Used by checkpoints.
  std::string name;

  void check_finite(const char* context) const;

 private:
  std::vector<size_t> shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(std::vector<size_t> shape) {
  return std::make_shared<Tensor>(std::move(shape));
}
inline TensorPtr make_tensor(std::vector<size_t> shape,
                             std::vector<double> values) {
  return std::make_shared<Tensor>(std::move(shape), std::move(values));
}
inline TensorPtr make_scalar(double v) {
  return std::make_shared<Tensor>(Tensor::scalar(v));
}

// Deterministic 53-bit uniform sampler. std::uniform_real_distribution is
// implementation-defined, so seeding-sensitive code uses this instead.
class UniformSampler {
 public:
  explicit UniformSampler(uint64_t seed) : state_(seed ? seed : 0x9E3779B9ULL) {}

  // [0, 1)
  double next() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  // [lo, hi)
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }
  // [0, n)
  uint64_t next_index(uint64_t n) { return next_u64() % n; }

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

// Fisher-Yates with explicit draws so the permutation is a pure function
// of the seed on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, UniformSampler& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Parameter initialization: uniform in [-k, k] with k = 1 / sqrt(fan_in).
TensorPtr make_parameter(std::string name, std::vector<size_t> shape,
                         size_t fan_in, UniformSampler& rng);

}  // namespace kiwi::numerics
