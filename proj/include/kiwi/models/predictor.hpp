#pragma once

#include "kiwi/models/layers.hpp"

namespace kiwi::models {

struct PredictorOptions {
  size_t embedding_dim = 64;
  size_t lstm_dim = 128;    // encoder and decoder LSTM size per direction
  size_t hidden_dim = 128;  // pre-output layer fed by query + attention
};

// Word predictor over parallel text: a bidirectional LSTM encodes the
// input side; two unidirectional LSTMs read the output side left-to-right
// and right-to-left. The distribution for position i is computed from the
// L2R state before token i and the R2L state after it, so it never reads
// token i itself. Direction src2mt predicts the MT side from the source;
// mt2src swaps the sides (used for source-tag estimation).
class PredictorModel : public Model {
 public:
  PredictorModel(const PredictorOptions& options, size_t enc_vocab,
                 size_t out_vocab, Direction direction, uint64_t seed);

  std::string kind() const override { return "predictor"; }
  Direction direction() const { return direction_; }
  const PredictorOptions& options() const { return options_; }
  size_t enc_vocab() const { return enc_vocab_; }
  size_t out_vocab() const { return out_vocab_; }
  size_t feature_dim() const { return options_.hidden_dim + 2 * options_.lstm_dim; }

  const std::vector<TensorPtr>& parameters() const override { return params_; }
  const std::vector<TensorPtr>& all_parameters() const override {
    return params_;
  }

  BatchOutput forward_batch(Graph& g, const data::Batch& batch,
                            bool with_loss) override;

  struct SentenceForward {
    TensorPtr logits;     // [T, out_vocab]
    TensorPtr features;   // [T, hidden + 2 * lstm]: pre-output layer plus
                          // the L2R and R2L states after consuming token i
    TensorPtr attention;  // [T, |input| + 2] attention weights per position
  };

  // enc_ids / out_ids are unframed token ids; framing with start/stop
  // symbols happens inside. out_ids must be non-empty.
  SentenceForward sentence_forward(Graph& g, const std::vector<int>& enc_ids,
                                   const std::vector<int>& out_ids);

  // Freezing excludes the parameters from parameters() and stops gradient
  // flow into them.
  void set_trainable(bool trainable);
  bool trainable() const { return trainable_; }

  nlohmann::json manifest() const override;
  bool recurrent() const override { return true; }

 private:
  PredictorOptions options_;
  size_t enc_vocab_, out_vocab_;
  Direction direction_;
  bool trainable_ = true;

  TensorPtr enc_embed_;
  TensorPtr out_embed_;
  LstmCell enc_fwd_, enc_bwd_;
  LstmCell l2r_, r2l_;
  TensorPtr attn_W_;  // [2 * lstm, 2 * lstm]
  Linear hidden_;
  Linear output_;
  std::vector<TensorPtr> params_;
};

}  // namespace kiwi::models
