#include "kiwi/numerics/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "kiwi/common.hpp"

namespace kiwi::numerics {

namespace {

void require(bool cond, const char* op, const std::string& detail) {
  if (!cond) throw NumericsError(strformat("%s: %s", op, detail.c_str()));
}

bool same_shape(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape();
}

}  // namespace

TensorPtr Graph::emit(const char* op, std::vector<TensorPtr> inputs,
                      TensorPtr output, std::function<void()> backward_fn) {
  output->requires_grad = false;
  for (const auto& in : inputs) {
    if (in->requires_grad) {
      output->requires_grad = true;
      break;
    }
  }
  if (debug_checks()) output->check_finite(op);
  tape_.push_back(Node{std::move(inputs), output, std::move(backward_fn), op});
  return output;
}

TensorPtr Graph::add(TensorPtr a, TensorPtr b) {
  require(same_shape(*a, *b), "add",
          "operands must have identical shapes");
  auto out = make_tensor(a->shape());
  const size_t n = a->size();
  for (size_t i = 0; i < n; ++i)
    out->values()[i] = a->values()[i] + b->values()[i];
  return emit("add", {a, b}, out, [a, b, out] {
    const auto& g = out->grad();
    if (a->requires_grad) {
      auto& ga = a->grad();
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (b->requires_grad) {
      auto& gb = b->grad();
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    }
  });
}

TensorPtr Graph::mul(TensorPtr a, TensorPtr b) {
  require(same_shape(*a, *b), "mul",
          "operands must have identical shapes");
  auto out = make_tensor(a->shape());
  const size_t n = a->size();
  for (size_t i = 0; i < n; ++i)
    out->values()[i] = a->values()[i] * b->values()[i];
  return emit("mul", {a, b}, out, [a, b, out] {
    const auto& g = out->grad();
    if (a->requires_grad) {
      auto& ga = a->grad();
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b->values()[i];
    }
    if (b->requires_grad) {
      auto& gb = b->grad();
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a->values()[i];
    }
  });
}

TensorPtr Graph::affine(TensorPtr x, double alpha, double beta) {
  auto out = make_tensor(x->shape());
  const size_t n = x->size();
  for (size_t i = 0; i < n; ++i)
    out->values()[i] = alpha * x->values()[i] + beta;
  return emit("affine", {x}, out, [x, out, alpha] {
    if (!x->requires_grad) return;
    const auto& g = out->grad();
    auto& gx = x->grad();
    for (size_t i = 0; i < g.size(); ++i) gx[i] += alpha * g[i];
  });
}

TensorPtr Graph::add_row(TensorPtr m, TensorPtr row) {
  require(m->cols() == row->size(), "add_row",
          strformat("row size %zu does not match matrix columns %zu",
                    row->size(), m->cols()));
  auto out = make_tensor(m->shape());
  const size_t rows = m->rows(), cols = m->cols();
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c)
      out->at(r, c) = m->at(r, c) + row->values()[c];
  return emit("add_row", {m, row}, out, [m, row, out] {
    const size_t rows = m->rows(), cols = m->cols();
    if (m->requires_grad) {
      auto& gm = m->grad();
      const auto& g = out->grad();
      for (size_t i = 0; i < g.size(); ++i) gm[i] += g[i];
    }
    if (row->requires_grad) {
      auto& gr = row->grad();
      for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
          gr[c] += out->grad()[r * cols + c];
    }
  });
}

TensorPtr Graph::matmul(TensorPtr a, TensorPtr b) {
  require(a->cols() == b->rows(), "matmul",
          strformat("inner dimensions differ: %zu vs %zu", a->cols(),
                    b->rows()));
  const size_t m = a->rows(), k = a->cols(), n = b->cols();
  auto out = make_tensor({m, n});
  for (size_t i = 0; i < m; ++i) {
    for (size_t p = 0; p < k; ++p) {
      const double av = a->at(i, p);
      if (av == 0.0) continue;
      for (size_t j = 0; j < n; ++j) out->at(i, j) += av * b->at(p, j);
    }
  }
  return emit("matmul", {a, b}, out, [a, b, out, m, k, n] {
    if (a->requires_grad) {
      // gA = g . B^T
      for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) {
          const double g = out->grad()[i * n + j];
          if (g == 0.0) continue;
          for (size_t p = 0; p < k; ++p)
            a->grad()[i * k + p] += g * b->at(p, j);
        }
    }
    if (b->requires_grad) {
      // gB = A^T . g
      for (size_t i = 0; i < m; ++i)
        for (size_t p = 0; p < k; ++p) {
          const double av = a->at(i, p);
          if (av == 0.0) continue;
          for (size_t j = 0; j < n; ++j)
            b->grad()[p * n + j] += av * out->grad()[i * n + j];
        }
    }
  });
}

TensorPtr Graph::transpose(TensorPtr a) {
  const size_t r = a->rows(), c = a->cols();
  auto out = make_tensor({c, r});
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out->at(j, i) = a->at(i, j);
  return emit("transpose", {a}, out, [a, out, r, c] {
    if (!a->requires_grad) return;
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j)
        a->grad()[i * c + j] += out->grad()[j * r + i];
  });
}

TensorPtr Graph::tanh(TensorPtr x) {
  auto out = make_tensor(x->shape());
  for (size_t i = 0; i < x->size(); ++i)
    out->values()[i] = std::tanh(x->values()[i]);
  return emit("tanh", {x}, out, [x, out] {
    if (!x->requires_grad) return;
    auto& gx = x->grad();
    for (size_t i = 0; i < out->size(); ++i) {
      const double y = out->values()[i];
      gx[i] += out->grad()[i] * (1.0 - y * y);
    }
  });
}

TensorPtr Graph::sigmoid(TensorPtr x) {
  auto out = make_tensor(x->shape());
  for (size_t i = 0; i < x->size(); ++i) {
    const double v = x->values()[i];
    out->values()[i] = v >= 0 ? 1.0 / (1.0 + std::exp(-v))
                              : std::exp(v) / (1.0 + std::exp(v));
  }
  return emit("sigmoid", {x}, out, [x, out] {
    if (!x->requires_grad) return;
    auto& gx = x->grad();
    for (size_t i = 0; i < out->size(); ++i) {
      const double y = out->values()[i];
      gx[i] += out->grad()[i] * y * (1.0 - y);
    }
  });
}

TensorPtr Graph::relu(TensorPtr x) {
  auto out = make_tensor(x->shape());
  for (size_t i = 0; i < x->size(); ++i)
    out->values()[i] = x->values()[i] > 0.0 ? x->values()[i] : 0.0;
  return emit("relu", {x}, out, [x, out] {
    if (!x->requires_grad) return;
    auto& gx = x->grad();
    for (size_t i = 0; i < out->size(); ++i)
      if (x->values()[i] > 0.0) gx[i] += out->grad()[i];
  });
}

TensorPtr Graph::softmax_rows(TensorPtr x) {
  const size_t rows = x->rows(), cols = x->cols();
  auto out = make_tensor(x->shape());
  for (size_t r = 0; r < rows; ++r) {
    double mx = x->at(r, 0);
    for (size_t c = 1; c < cols; ++c) mx = std::max(mx, x->at(r, c));
    double z = 0.0;
    for (size_t c = 0; c < cols; ++c) {
      const double e = std::exp(x->at(r, c) - mx);
      out->at(r, c) = e;
      z += e;
    }
    for (size_t c = 0; c < cols; ++c) out->at(r, c) /= z;
  }
  return emit("softmax", {x}, out, [x, out, rows, cols] {
    if (!x->requires_grad) return;
    for (size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (size_t c = 0; c < cols; ++c)
        dot += out->grad()[r * cols + c] * out->values()[r * cols + c];
      for (size_t c = 0; c < cols; ++c) {
        const double y = out->values()[r * cols + c];
        x->grad()[r * cols + c] += y * (out->grad()[r * cols + c] - dot);
      }
    }
  });
}

TensorPtr Graph::concat_cols(const std::vector<TensorPtr>& xs) {
  require(!xs.empty(), "concat_cols", "needs at least one input");
  const size_t rows = xs[0]->rows();
  size_t cols = 0;
  for (const auto& x : xs) {
    require(x->rows() == rows, "concat_cols", "row counts differ");
    cols += x->cols();
  }
  auto out = make_tensor({rows, cols});
  size_t offset = 0;
  for (const auto& x : xs) {
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < x->cols(); ++c)
        out->at(r, offset + c) = x->at(r, c);
    offset += x->cols();
  }
  auto inputs = xs;
  return emit("concat_cols", xs, out, [inputs, out, rows, cols] {
    size_t offset = 0;
    for (const auto& x : inputs) {
      if (x->requires_grad) {
        for (size_t r = 0; r < rows; ++r)
          for (size_t c = 0; c < x->cols(); ++c)
            x->grad()[r * x->cols() + c] += out->grad()[r * cols + offset + c];
      }
      offset += x->cols();
    }
  });
}

TensorPtr Graph::concat_rows(const std::vector<TensorPtr>& xs) {
  require(!xs.empty(), "concat_rows", "needs at least one input");
  const size_t cols = xs[0]->cols();
  size_t rows = 0;
  for (const auto& x : xs) {
    require(x->cols() == cols, "concat_rows", "column counts differ");
    rows += x->rows();
  }
  auto out = make_tensor({rows, cols});
  size_t offset = 0;
  for (const auto& x : xs) {
    std::copy(x->values().begin(), x->values().end(),
              out->values().begin() + static_cast<long>(offset));
    offset += x->size();
  }
  auto inputs = xs;
  return emit("concat_rows", xs, out, [inputs, out] {
    size_t offset = 0;
    for (const auto& x : inputs) {
      if (x->requires_grad) {
        for (size_t i = 0; i < x->size(); ++i)
          x->grad()[i] += out->grad()[offset + i];
      }
      offset += x->size();
    }
  });
}

TensorPtr Graph::slice_rows(TensorPtr x, size_t begin, size_t count) {
  require(begin + count <= x->rows(), "slice_rows", "range out of bounds");
  const size_t cols = x->cols();
  auto out = make_tensor({count, cols});
  std::copy(x->values().begin() + static_cast<long>(begin * cols),
            x->values().begin() + static_cast<long>((begin + count) * cols),
            out->values().begin());
  return emit("slice_rows", {x}, out, [x, out, begin, cols] {
    if (!x->requires_grad) return;
    for (size_t i = 0; i < out->size(); ++i)
      x->grad()[begin * cols + i] += out->grad()[i];
  });
}

TensorPtr Graph::slice_cols(TensorPtr x, size_t begin, size_t count) {
  require(begin + count <= x->cols(), "slice_cols", "range out of bounds");
  const size_t rows = x->rows(), cols = x->cols();
  auto out = make_tensor({rows, count});
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < count; ++c) out->at(r, c) = x->at(r, begin + c);
  return emit("slice_cols", {x}, out, [x, out, begin, rows, cols, count] {
    if (!x->requires_grad) return;
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < count; ++c)
        x->grad()[r * cols + begin + c] += out->grad()[r * count + c];
  });
}

TensorPtr Graph::reshape(TensorPtr x, std::vector<size_t> shape) {
  auto out = make_tensor(std::move(shape), x->values());
  require(out->size() == x->size(), "reshape", "element count must match");
  return emit("reshape", {x}, out, [x, out] {
    if (!x->requires_grad) return;
    for (size_t i = 0; i < out->size(); ++i) x->grad()[i] += out->grad()[i];
  });
}

TensorPtr Graph::embedding_lookup(TensorPtr table, const std::vector<int>& ids) {
  require(table->rank() == 2, "embedding_lookup", "table must be rank 2");
  require(!ids.empty(), "embedding_lookup", "needs at least one id");
  const size_t v = table->rows(), d = table->cols();
  for (int id : ids)
    require(id >= 0 && static_cast<size_t>(id) < v, "embedding_lookup",
            strformat("id %d out of range for table with %zu rows", id, v));
  auto out = make_tensor({ids.size(), d});
  for (size_t k = 0; k < ids.size(); ++k)
    for (size_t c = 0; c < d; ++c)
      out->at(k, c) = table->at(static_cast<size_t>(ids[k]), c);
  auto ids_copy = ids;
  return emit("embedding_lookup", {table}, out, [table, out, ids_copy, d] {
    if (!table->requires_grad) return;
    for (size_t k = 0; k < ids_copy.size(); ++k)
      for (size_t c = 0; c < d; ++c)
        table->grad()[static_cast<size_t>(ids_copy[k]) * d + c] +=
            out->grad()[k * d + c];
  });
}

TensorPtr Graph::cross_entropy(TensorPtr logits, const std::vector<int>& gold,
                               Reduction reduction) {
  const size_t rows = logits->rows(), cols = logits->cols();
  require(gold.size() == rows, "cross_entropy",
          strformat("gold size %zu does not match row count %zu", gold.size(),
                    rows));
  for (int g : gold)
    require(g >= 0 && static_cast<size_t>(g) < cols, "cross_entropy",
            strformat("gold class %d out of range", g));
  double total = 0.0;
  for (size_t r = 0; r < rows; ++r) {
    double mx = logits->at(r, 0);
    for (size_t c = 1; c < cols; ++c) mx = std::max(mx, logits->at(r, c));
    double z = 0.0;
    for (size_t c = 0; c < cols; ++c) z += std::exp(logits->at(r, c) - mx);
    total += mx + std::log(z) - logits->at(r, static_cast<size_t>(gold[r]));
  }
  const double scale0 = reduction == Reduction::Mean
                            ? 1.0 / static_cast<double>(rows)
                            : 1.0;
  auto out = make_scalar(total * scale0);
  auto gold_copy = gold;
  return emit("cross_entropy", {logits}, out,
              [logits, out, gold_copy, rows, cols, scale0] {
                if (!logits->requires_grad) return;
                const double scale = out->grad()[0] * scale0;
                for (size_t r = 0; r < rows; ++r) {
                  double mx = logits->at(r, 0);
                  for (size_t c = 1; c < cols; ++c)
                    mx = std::max(mx, logits->at(r, c));
                  double z = 0.0;
                  for (size_t c = 0; c < cols; ++c)
                    z += std::exp(logits->at(r, c) - mx);
                  for (size_t c = 0; c < cols; ++c) {
                    const double p = std::exp(logits->at(r, c) - mx) / z;
                    const double onehot =
                        c == static_cast<size_t>(gold_copy[r]) ? 1.0 : 0.0;
                    logits->grad()[r * cols + c] += scale * (p - onehot);
                  }
                }
              });
}

TensorPtr Graph::mse(TensorPtr pred, TensorPtr target) {
  require(same_shape(*pred, *target), "mse",
          "operands must have identical shapes");
  const size_t n = pred->size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = pred->values()[i] - target->values()[i];
    total += d * d;
  }
  auto out = make_scalar(total / static_cast<double>(n));
  return emit("mse", {pred, target}, out, [pred, target, out, n] {
    const double scale = out->grad()[0] * 2.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
      const double d = pred->values()[i] - target->values()[i];
      if (pred->requires_grad) pred->grad()[i] += scale * d;
      if (target->requires_grad) target->grad()[i] -= scale * d;
    }
  });
}

TensorPtr Graph::sum(TensorPtr x) {
  double total = 0.0;
  for (double v : x->values()) total += v;
  auto out = make_scalar(total);
  return emit("sum", {x}, out, [x, out] {
    if (!x->requires_grad) return;
    const double g = out->grad()[0];
    for (auto& gi : x->grad()) gi += g;
  });
}

TensorPtr Graph::mean(TensorPtr x) {
  double total = 0.0;
  for (double v : x->values()) total += v;
  const size_t n = x->size();
  auto out = make_scalar(total / static_cast<double>(n));
  return emit("mean", {x}, out, [x, out, n] {
    if (!x->requires_grad) return;
    const double g = out->grad()[0] / static_cast<double>(n);
    for (auto& gi : x->grad()) gi += g;
  });
}

void Graph::register_parameters(const std::vector<TensorPtr>& params) {
  params_.insert(params_.end(), params.begin(), params.end());
}

void Graph::backward(const TensorPtr& loss) {
  if (!loss->is_scalar())
    throw NumericsError("backward: loss must be a scalar tensor");

  // Validate tape order: every input must be a leaf or the output of an
  // earlier node. A violation means the graph has a cycle or was mutated.
  std::unordered_map<const Tensor*, size_t> produced_at;
  produced_at.reserve(tape_.size());
  for (size_t i = 0; i < tape_.size(); ++i) {
    for (const auto& in : tape_[i].inputs) {
      auto it = produced_at.find(in.get());
      if (it != produced_at.end() && it->second >= i)
        throw NumericsError(
            strformat("backward: cycle detected at op '%s'", tape_[i].op));
    }
    produced_at[tape_[i].output.get()] = i;
  }

  for (auto& node : tape_) {
    if (node.output->requires_grad) node.output->zero_grad();
    for (auto& in : node.inputs)
      if (in->requires_grad) in->zero_grad();
  }
  for (auto& p : params_) p->zero_grad();

  loss->ensure_grad();
  loss->grad()[0] = 1.0;

  for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
    if (!it->output->requires_grad || !it->output->has_grad()) continue;
    it->backward_fn();
  }
}

}  // namespace kiwi::numerics
