#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kiwi/data/batch.hpp"
#include "kiwi/models/model.hpp"
#include "kiwi/numerics/graph.hpp"

namespace kiwi::models {

using numerics::Graph;
using numerics::TensorPtr;
using numerics::UniformSampler;

struct Linear {
  TensorPtr W;  // [in, out]
  TensorPtr b;  // [out]

  Linear() = default;
  Linear(const std::string& name, size_t in, size_t out, UniformSampler& rng);

  TensorPtr operator()(Graph& g, TensorPtr x) const;
  void collect(std::vector<TensorPtr>& out) const;
};

struct LstmCell {
  TensorPtr Wx;  // [in, 4H] gate order: input, forget, candidate, output
  TensorPtr Wh;  // [H, 4H]
  TensorPtr b;   // [4H]
  size_t hidden = 0;

  LstmCell() = default;
  LstmCell(const std::string& name, size_t in, size_t hidden,
           UniformSampler& rng);

  // (h, c) -> (h', c'); all states are [1, H].
  std::pair<TensorPtr, TensorPtr> step(Graph& g, TensorPtr x, TensorPtr h,
                                       TensorPtr c) const;
  void collect(std::vector<TensorPtr>& out) const;
};

struct GruCell {
  TensorPtr Wx;  // [in, 3H] gate order: reset, update, candidate
  TensorPtr Wh;  // [H, 3H]
  TensorPtr bx;  // [3H]
  TensorPtr bh;  // [3H]
  size_t hidden = 0;

  GruCell() = default;
  GruCell(const std::string& name, size_t in, size_t hidden,
          UniformSampler& rng);

  TensorPtr step(Graph& g, TensorPtr x, TensorPtr h) const;
  void collect(std::vector<TensorPtr>& out) const;
};

// Runs a recurrent cell over the rows of xs [T, D]. states[t] is the hidden
// state (a [1, H] tensor) after the cell has consumed row t, regardless of
// traversal direction.
std::vector<TensorPtr> run_lstm(Graph& g, const LstmCell& cell, TensorPtr xs,
                                bool reverse);
std::vector<TensorPtr> run_gru(Graph& g, const GruCell& cell, TensorPtr xs,
                               bool reverse);

// Per-position window featurization shared by the window-based taggers.
// For every labeled position of the task it yields w ids from the own-side
// sentence and w ids from the aligned counterpart sentence.
struct WindowFeatures {
  std::vector<int> own_ids;             // positions * window
  std::vector<int> aligned_ids;         // positions * window
  std::vector<size_t> sentence_offsets;  // size B+1 prefix of position counts
  std::vector<int> gold;                 // flattened tags; empty if absent
  size_t positions = 0;
};

WindowFeatures window_features(const data::Batch& batch, WordTask task,
                               int window);

}  // namespace kiwi::models
