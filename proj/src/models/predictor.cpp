#include "kiwi/models/predictor.hpp"

#include <algorithm>

#include "kiwi/common.hpp"

namespace kiwi::models {

using numerics::make_parameter;

PredictorModel::PredictorModel(const PredictorOptions& options,
                               size_t enc_vocab, size_t out_vocab,
                               Direction direction, uint64_t seed)
    : options_(options),
      enc_vocab_(enc_vocab),
      out_vocab_(out_vocab),
      direction_(direction) {
  UniformSampler rng(seed);
  const size_t d = options.embedding_dim;
  const size_t h = options.lstm_dim;
  enc_embed_ = make_parameter("predictor.enc_embed", {enc_vocab, d}, d, rng);
  out_embed_ = make_parameter("predictor.out_embed", {out_vocab, d}, d, rng);
  enc_fwd_ = LstmCell("predictor.enc.fwd", d, h, rng);
  enc_bwd_ = LstmCell("predictor.enc.bwd", d, h, rng);
  l2r_ = LstmCell("predictor.l2r", d, h, rng);
  r2l_ = LstmCell("predictor.r2l", d, h, rng);
  attn_W_ = make_parameter("predictor.attn.W", {2 * h, 2 * h}, 2 * h, rng);
  hidden_ = Linear("predictor.hidden", 4 * h, options.hidden_dim, rng);
  output_ = Linear("predictor.output", options.hidden_dim, out_vocab, rng);
  params_ = {enc_embed_, out_embed_};
  enc_fwd_.collect(params_);
  enc_bwd_.collect(params_);
  l2r_.collect(params_);
  r2l_.collect(params_);
  params_.push_back(attn_W_);
  hidden_.collect(params_);
  output_.collect(params_);
}

void PredictorModel::set_trainable(bool trainable) {
  trainable_ = trainable;
  for (auto& p : params_) p->requires_grad = trainable;
}

PredictorModel::SentenceForward PredictorModel::sentence_forward(
    Graph& g, const std::vector<int>& enc_ids,
    const std::vector<int>& out_ids) {
  if (out_ids.empty())
    throw NumericsError("predictor: output sentence must be non-empty");

  // Encoder over [start] + input + [stop].
  std::vector<int> framed_enc;
  framed_enc.reserve(enc_ids.size() + 2);
  framed_enc.push_back(data::kStartId);
  framed_enc.insert(framed_enc.end(), enc_ids.begin(), enc_ids.end());
  framed_enc.push_back(data::kStopId);
  auto enc_emb = g.embedding_lookup(enc_embed_, framed_enc);
  auto enc_f = run_lstm(g, enc_fwd_, enc_emb, false);
  auto enc_b = run_lstm(g, enc_bwd_, enc_emb, true);
  std::vector<TensorPtr> enc_rows(framed_enc.size());
  for (size_t t = 0; t < framed_enc.size(); ++t)
    enc_rows[t] = g.concat_cols({enc_f[t], enc_b[t]});
  auto enc_states = g.concat_rows(enc_rows);          // [S+2, 2H]
  auto enc_states_t = g.transpose(enc_states);        // [2H, S+2]

  // Output side framed the same way; predictions cover positions 1..T.
  std::vector<int> framed_out;
  framed_out.reserve(out_ids.size() + 2);
  framed_out.push_back(data::kStartId);
  framed_out.insert(framed_out.end(), out_ids.begin(), out_ids.end());
  framed_out.push_back(data::kStopId);
  auto out_emb = g.embedding_lookup(out_embed_, framed_out);
  auto l2r_states = run_lstm(g, l2r_, out_emb, false);
  auto r2l_states = run_lstm(g, r2l_, out_emb, true);

  const size_t tokens = out_ids.size();
  std::vector<TensorPtr> logits_rows(tokens), feature_rows(tokens),
      attention_rows(tokens);
  for (size_t i = 1; i <= tokens; ++i) {
    // Context states that have not consumed token i.
    auto query = g.concat_cols({l2r_states[i - 1], r2l_states[i + 1]});
    auto scores = g.matmul(g.matmul(query, attn_W_), enc_states_t);
    auto attention = g.softmax_rows(scores);           // [1, S+2]
    auto context = g.matmul(attention, enc_states);    // [1, 2H]
    auto hid = g.tanh(hidden_(g, g.concat_cols({query, context})));
    logits_rows[i - 1] = output_(g, hid);
    attention_rows[i - 1] = attention;
    // Estimator features: pre-output layer plus the states that have
    // consumed token i in each direction.
    feature_rows[i - 1] = g.concat_cols({hid, l2r_states[i], r2l_states[i]});
  }
  SentenceForward result;
  result.logits = g.concat_rows(logits_rows);
  result.features = g.concat_rows(feature_rows);
  result.attention = g.concat_rows(attention_rows);
  return result;
}

BatchOutput PredictorModel::forward_batch(Graph& g, const data::Batch& batch,
                                          bool with_loss) {
  g.register_parameters(params_);
  BatchOutput out;
  std::vector<TensorPtr> all_logits;
  std::vector<int> gold;
  for (size_t b = 0; b < batch.size; ++b) {
    std::vector<int> enc_ids, out_ids;
    if (direction_ == Direction::SrcToMt) {
      enc_ids = batch.src_row(b);
      out_ids = batch.mt_row(b);
    } else {
      enc_ids = batch.mt_row(b);
      out_ids = batch.src_row(b);
    }
    if (out_ids.empty()) continue;
    auto fwd = sentence_forward(g, enc_ids, out_ids);
    all_logits.push_back(fwd.logits);
    for (size_t i = 0; i < out_ids.size(); ++i) {
      // Token accuracy: argmax over the output vocabulary.
      const auto& row_logits = fwd.logits;
      size_t best = 0;
      for (size_t c = 1; c < out_vocab_; ++c)
        if (row_logits->at(i, c) > row_logits->at(i, best)) best = c;
      if (static_cast<int>(best) == out_ids[i]) ++out.tokens_correct;
      ++out.tokens_total;
      gold.push_back(out_ids[i]);
    }
  }
  if (gold.empty()) return out;
  if (with_loss) {
    out.loss = g.cross_entropy(g.concat_rows(all_logits), gold);
    out.loss_positions = gold.size();
  }
  return out;
}

nlohmann::json PredictorModel::manifest() const {
  return {{"direction", direction_name(direction_)},
          {"embedding_dim", options_.embedding_dim},
          {"lstm_dim", options_.lstm_dim},
          {"hidden_dim", options_.hidden_dim}};
}

}  // namespace kiwi::models
