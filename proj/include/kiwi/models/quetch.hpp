#pragma once

#include "kiwi/models/layers.hpp"

namespace kiwi::models {

struct QuetchOptions {
  int window = 3;
  size_t embedding_dim = 64;
  size_t hidden_dim = 128;
};

// Window-based multilayer perceptron tagger: lookup tables for the task
// side and its aligned counterpart, one tanh hidden layer, and a 2-way
// softmax per labeled position. One instance handles exactly one task;
// instances never share parameters.
class QuetchModel : public Model {
 public:
  QuetchModel(WordTask task, const QuetchOptions& options, size_t src_vocab,
              size_t tgt_vocab, uint64_t seed);

  std::string kind() const override { return "quetch"; }
  WordTask task() const { return task_; }
  const QuetchOptions& options() const { return options_; }

  const std::vector<TensorPtr>& parameters() const override { return params_; }
  const std::vector<TensorPtr>& all_parameters() const override {
    return params_;
  }

  BatchOutput forward_batch(Graph& g, const data::Batch& batch,
                            bool with_loss) override;

  nlohmann::json manifest() const override;
  bool recurrent() const override { return false; }

 private:
  WordTask task_;
  QuetchOptions options_;
  TensorPtr tgt_embed_;  // embeds MT-side tokens
  TensorPtr src_embed_;  // embeds source-side tokens
  Linear hidden_;
  Linear output_;
  std::vector<TensorPtr> params_;
};

}  // namespace kiwi::models
