#pragma once

#include "kiwi/models/layers.hpp"

namespace kiwi::models {

struct NuqeOptions {
  int window = 3;
  size_t embedding_dim = 64;
  size_t hidden_dim = 128;  // width of both feed-forward stacks
  size_t rnn_dim = 64;      // per-direction GRU size
};

// Window embeddings feed two feed-forward layers, a bidirectional GRU over
// the sentence, two more feed-forward layers, and a 2-way softmax. Layer
// order is FFx2 -> BiGRU -> FFx2 -> softmax.
class NuqeModel : public Model {
 public:
  NuqeModel(WordTask task, const NuqeOptions& options, size_t src_vocab,
            size_t tgt_vocab, uint64_t seed);

  std::string kind() const override { return "nuqe"; }
  WordTask task() const { return task_; }
  const NuqeOptions& options() const { return options_; }

  const std::vector<TensorPtr>& parameters() const override { return params_; }
  const std::vector<TensorPtr>& all_parameters() const override {
    return params_;
  }

  BatchOutput forward_batch(Graph& g, const data::Batch& batch,
                            bool with_loss) override;

  nlohmann::json manifest() const override;
  bool recurrent() const override { return true; }

 private:
  WordTask task_;
  NuqeOptions options_;
  TensorPtr tgt_embed_;
  TensorPtr src_embed_;
  Linear ff1_a_, ff1_b_;
  GruCell gru_fwd_, gru_bwd_;
  Linear ff2_a_, ff2_b_;
  Linear output_;
  std::vector<TensorPtr> params_;
};

}  // namespace kiwi::models
