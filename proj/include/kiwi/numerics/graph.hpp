#pragma once

#include <functional>
#include <vector>

#include "kiwi/numerics/tensor.hpp"

namespace kiwi::numerics {

enum class Reduction { Mean, Sum };

// Reverse-mode autodiff tape. Ops append nodes in construction order, which
// is a valid topological order; backward() visits them exactly once in
// reverse. Single-threaded per training run.
class Graph {
 public:
  // Elementwise; shapes must match exactly.
  TensorPtr add(TensorPtr a, TensorPtr b);
  TensorPtr mul(TensorPtr a, TensorPtr b);
  // y = alpha * x + beta
  TensorPtr affine(TensorPtr x, double alpha, double beta);
  TensorPtr sub(TensorPtr a, TensorPtr b) { return add(a, affine(b, -1.0, 0.0)); }

  // Adds a row vector [C] to every row of m [R, C].
  TensorPtr add_row(TensorPtr m, TensorPtr row);

  // a [M, K] x b [K, N] -> [M, N]
  TensorPtr matmul(TensorPtr a, TensorPtr b);
  TensorPtr transpose(TensorPtr a);

  TensorPtr tanh(TensorPtr x);
  TensorPtr sigmoid(TensorPtr x);
  TensorPtr relu(TensorPtr x);

  // Row-wise softmax over the last dimension of a [R, C] matrix.
  TensorPtr softmax_rows(TensorPtr x);

  TensorPtr concat_cols(const std::vector<TensorPtr>& xs);
  TensorPtr concat_rows(const std::vector<TensorPtr>& xs);
  TensorPtr slice_rows(TensorPtr x, size_t begin, size_t count);
  TensorPtr slice_cols(TensorPtr x, size_t begin, size_t count);

  // Same buffer, new shape; element count must be preserved.
  TensorPtr reshape(TensorPtr x, std::vector<size_t> shape);

  // Gathers rows of table [V, D] by id -> [ids.size(), D].
  TensorPtr embedding_lookup(TensorPtr table, const std::vector<int>& ids);

  // Fused softmax + negative log likelihood on logits [R, C] against gold
  // class ids (one per row). Gradient is softmax(row) - onehot(gold).
  TensorPtr cross_entropy(TensorPtr logits, const std::vector<int>& gold,
                          Reduction reduction = Reduction::Mean);

  // Mean squared error between same-shape tensors.
  TensorPtr mse(TensorPtr pred, TensorPtr target);

  TensorPtr sum(TensorPtr x);
  TensorPtr mean(TensorPtr x);

  // Parameters registered here get their gradients zeroed by backward()
  // even when the loss does not reach them.
  void register_parameters(const std::vector<TensorPtr>& params);

  // Populates grad = d(loss)/d(tensor) for every requires_grad tensor that
  // participates in the tape, in reverse topological order. The loss must
  // be scalar. Deterministic: same inputs give bit-identical gradients.
  void backward(const TensorPtr& loss);

  size_t node_count() const { return tape_.size(); }

 private:
  struct Node {
    std::vector<TensorPtr> inputs;
    TensorPtr output;
    std::function<void()> backward_fn;
    const char* op;
  };

  TensorPtr emit(const char* op, std::vector<TensorPtr> inputs,
                 TensorPtr output, std::function<void()> backward_fn);

  std::vector<Node> tape_;
  std::vector<TensorPtr> params_;
};

}  // namespace kiwi::numerics
