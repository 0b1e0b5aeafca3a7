#pragma once

#include "kiwi/ensemble/ensemble.hpp"
#include "kiwi/trainer/checkpoint_dir.hpp"

namespace kiwi::trainer {

// Runs a loaded checkpoint over samples and returns BAD probabilities for
// the model's word stream (plus sentence scores for the estimator).
// Out-of-vocabulary tokens map to the unknown symbol; the model is not
// mutated, so repeated calls are bit-identical. Throws on an empty sample
// list and on checkpoints with no QE prediction surface (the predictor).
ensemble::SystemPrediction predict(const LoadedCheckpoint& checkpoint,
                                   const std::vector<data::QESample>& samples,
                                   size_t batch_size = 32);

}  // namespace kiwi::trainer
