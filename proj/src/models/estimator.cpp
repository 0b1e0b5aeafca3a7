#include "kiwi/models/estimator.hpp"

#include "kiwi/common.hpp"

namespace kiwi::models {

using numerics::make_tensor;

EstimatorModel::EstimatorModel(const EstimatorOptions& options,
                               std::shared_ptr<PredictorModel> predictor,
                               uint64_t seed)
    : options_(options), predictor_(std::move(predictor)) {
  if (options_.task == WordTask::Gaps)
    throw ConfigError("estimator does not support the gap task");
  const Direction wanted = options_.task == WordTask::Mt ? Direction::SrcToMt
                                                         : Direction::MtToSrc;
  if (predictor_->direction() != wanted)
    throw ConfigError(strformat(
        "estimator task '%s' needs a %s predictor but got %s "
        "(direction mismatch)",
        task_name(options_.task).c_str(), direction_name(wanted).c_str(),
        direction_name(predictor_->direction()).c_str()));

  UniformSampler rng(seed);
  const size_t feat = predictor_->feature_dim();
  const size_t e = options_.projection_dim;
  const size_t h = options_.lstm_dim;
  projection_ = Linear("estimator.projection", feat, e, rng);
  lstm_fwd_ = LstmCell("estimator.lstm.fwd", e, h, rng);
  lstm_bwd_ = LstmCell("estimator.lstm.bwd", e, h, rng);
  token_head_ = Linear("estimator.token_head", 2 * h, 2, rng);
  sentence_head_ = Linear("estimator.sentence_head", 2 * h, 1, rng);
  projection_.collect(own_params_);
  lstm_fwd_.collect(own_params_);
  lstm_bwd_.collect(own_params_);
  token_head_.collect(own_params_);
  sentence_head_.collect(own_params_);

  predictor_->set_trainable(options_.fine_tune_predictor);
  trainable_ = own_params_;
  if (options_.fine_tune_predictor)
    trainable_.insert(trainable_.end(), predictor_->parameters().begin(),
                      predictor_->parameters().end());
  all_ = own_params_;
  all_.insert(all_.end(), predictor_->all_parameters().begin(),
              predictor_->all_parameters().end());
}

BatchOutput EstimatorModel::forward_batch(Graph& g, const data::Batch& batch,
                                          bool with_loss) {
  g.register_parameters(trainable_);
  BatchOutput out;

  const bool source_task = options_.task == WordTask::Source;
  const auto* gold_tags =
      source_task ? (batch.src_tags ? &*batch.src_tags : nullptr)
                  : (batch.mt_tags ? &*batch.mt_tags : nullptr);

  std::vector<TensorPtr> token_logits;
  std::vector<TensorPtr> score_rows;
  std::vector<int> gold;
  for (size_t b = 0; b < batch.size; ++b) {
    std::vector<int> enc_ids, out_ids;
    if (source_task) {
      enc_ids = batch.mt_row(b);
      out_ids = batch.src_row(b);
    } else {
      enc_ids = batch.src_row(b);
      out_ids = batch.mt_row(b);
    }

    TensorPtr pooled;
    if (out_ids.empty()) {
      out.word_bad_probs.emplace_back();
      pooled = make_tensor({1, 2 * options_.lstm_dim});
    } else {
      auto features = predictor_->sentence_forward(g, enc_ids, out_ids).features;
      auto projected = g.tanh(projection_(g, features));
      auto fwd = run_lstm(g, lstm_fwd_, projected, false);
      auto bwd = run_lstm(g, lstm_bwd_, projected, true);
      const size_t tokens = out_ids.size();
      std::vector<TensorPtr> joined(tokens);
      for (size_t t = 0; t < tokens; ++t)
        joined[t] = g.concat_cols({fwd[t], bwd[t]});
      auto states = g.concat_rows(joined);  // [T, 2H]
      auto logits = token_head_(g, states);
      auto probs = g.softmax_rows(logits);
      std::vector<double> bad(tokens);
      for (size_t t = 0; t < tokens; ++t) bad[t] = probs->at(t, 1);
      out.word_bad_probs.push_back(std::move(bad));
      token_logits.push_back(logits);
      if (gold_tags)
        for (size_t t = 0; t < tokens; ++t) {
          const int v = gold_tags->at(b, t);
          if (v < 0)
            throw DataError("sample is missing gold tags for a labeled position");
          gold.push_back(v);
        }
      // Mean pooling over time feeds the sentence head.
      auto ones = make_tensor({1, tokens});
      for (auto& v : ones->values()) v = 1.0 / static_cast<double>(tokens);
      pooled = g.matmul(ones, states);
    }
    auto score = g.sigmoid(sentence_head_(g, pooled));  // [1, 1]
    out.sentence_scores.push_back(score->value());
    score_rows.push_back(score);
  }

  if (!with_loss) return out;

  TensorPtr loss;
  if (!gold.empty()) {
    loss = g.cross_entropy(g.concat_rows(token_logits), gold);
    out.loss_positions = gold.size();
  }
  if (batch.hter) {
    auto scores = g.concat_rows(score_rows);  // [B, 1]
    auto target = make_tensor({batch.size, 1}, *batch.hter);
    auto weighted = g.affine(g.mse(scores, target), options_.multitask_weight, 0.0);
    loss = loss ? g.add(loss, weighted) : weighted;
  }
  out.loss = loss;
  return out;
}

nlohmann::json EstimatorModel::manifest() const {
  return {{"task", task_name(options_.task)},
          {"projection_dim", options_.projection_dim},
          {"lstm_dim", options_.lstm_dim},
          {"multitask_weight", options_.multitask_weight},
          {"fine_tune_predictor", options_.fine_tune_predictor},
          {"predictor", predictor_->manifest()}};
}

}  // namespace kiwi::models
