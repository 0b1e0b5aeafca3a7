#include "kiwi/trainer/predict.hpp"

#include "kiwi/models/estimator.hpp"
#include "kiwi/models/nuqe.hpp"
#include "kiwi/models/quetch.hpp"

namespace kiwi::trainer {

namespace {

ensemble::Stream model_stream(const models::Model& model) {
  models::WordTask task;
  if (model.kind() == "quetch")
    task = static_cast<const models::QuetchModel&>(model).task();
  else if (model.kind() == "nuqe")
    task = static_cast<const models::NuqeModel&>(model).task();
  else
    task = static_cast<const models::EstimatorModel&>(model).task();
  switch (task) {
    case models::WordTask::Gaps: return ensemble::Stream::Gaps;
    case models::WordTask::Source: return ensemble::Stream::Source;
    default: return ensemble::Stream::Mt;
  }
}

}  // namespace

ensemble::SystemPrediction predict(const LoadedCheckpoint& checkpoint,
                                   const std::vector<data::QESample>& samples,
                                   size_t batch_size) {
  if (samples.empty())
    throw DataError("predict: empty sample list");
  auto& model = *checkpoint.model;
  if (model.kind() == "predictor")
    throw ConfigError(
        "predictor checkpoints provide features for an estimator and have "
        "no QE predictions; train an estimator on top of this checkpoint");

  data::Field src_field{checkpoint.src_vocab, 1};
  data::Field mt_field{checkpoint.mt_vocab, 1};
  data::BatchOptions options;
  options.batch_size = batch_size;
  options.shuffle = false;

  ensemble::SystemPrediction prediction;
  prediction.system_id = model.kind();
  const auto stream = model_stream(model);
  auto& rows = prediction.word_probs[stream];
  for (const auto& batch :
       data::make_batches(samples, src_field, mt_field, options)) {
    numerics::Graph g;
    auto out = model.forward_batch(g, batch, false);
    if (out.word_bad_probs.size() != batch.size)
      throw TrainError("predict: model returned a wrong number of sentences");
    for (auto& row : out.word_bad_probs) rows.push_back(std::move(row));
    for (double s : out.sentence_scores)
      prediction.sentence_scores.push_back(s);
  }
  return prediction;
}

}  // namespace kiwi::trainer
