#pragma once

#include <memory>

#include "kiwi/models/predictor.hpp"

namespace kiwi::models {

struct EstimatorOptions {
  size_t projection_dim = 64;
  size_t lstm_dim = 64;          // per-direction BiLSTM size
  double multitask_weight = 1.0; // weight of the sentence-score loss term
  bool fine_tune_predictor = false;
  WordTask task = WordTask::Mt;  // Mt, or Source with an mt2src predictor
};

// Quality classifier on top of predictor features: a projection, a
// bidirectional LSTM, an OK/BAD head per token and a sigmoid sentence-score
// head. Trained with token cross-entropy plus multitask_weight times the
// squared error on the sentence score.
class EstimatorModel : public Model {
 public:
  EstimatorModel(const EstimatorOptions& options,
                 std::shared_ptr<PredictorModel> predictor, uint64_t seed);

  std::string kind() const override { return "estimator"; }
  const EstimatorOptions& options() const { return options_; }
  WordTask task() const { return options_.task; }
  const PredictorModel& predictor() const { return *predictor_; }

  const std::vector<TensorPtr>& parameters() const override { return trainable_; }
  const std::vector<TensorPtr>& all_parameters() const override { return all_; }

  BatchOutput forward_batch(Graph& g, const data::Batch& batch,
                            bool with_loss) override;

  nlohmann::json manifest() const override;
  bool recurrent() const override { return true; }

 private:
  EstimatorOptions options_;
  std::shared_ptr<PredictorModel> predictor_;
  Linear projection_;
  LstmCell lstm_fwd_, lstm_bwd_;
  Linear token_head_;
  Linear sentence_head_;
  std::vector<TensorPtr> own_params_;
  std::vector<TensorPtr> trainable_;
  std::vector<TensorPtr> all_;
};

}  // namespace kiwi::models
