#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kiwi/data/batch.hpp"
#include "kiwi/ensemble/ensemble.hpp"
#include "kiwi/models/model.hpp"

namespace kiwi::trainer {

struct DataFiles {
  std::string src;
  std::string mt;
  std::string alignments;
  std::string mt_tags;
  std::string gap_tags;
  std::string src_tags;
  std::string hter;
};

struct TrainConfig {
  uint64_t seed = 42;
  std::string output_dir;

  // model
  std::string model_kind;            // quetch | nuqe | predictor | estimator
  std::string task = "mt";           // mt | gaps | source
  std::string direction = "src2mt";  // predictor output side
  int window = 3;
  size_t embedding_dim = 64;
  size_t hidden_dim = 128;
  size_t rnn_dim = 64;        // nuqe GRU size
  size_t lstm_dim = 128;      // predictor LSTM size
  size_t projection_dim = 64; // estimator feature projection
  size_t estimator_lstm_dim = 64;
  double multitask_weight = 1.0;
  std::string predictor_checkpoint;  // estimator: reuse a pretrained predictor
  bool fine_tune_predictor = false;

  // data
  DataFiles train;
  DataFiles valid;
  int min_frequency = 1;
  size_t max_length = 200;

  // training
  size_t epochs = 50;
  size_t batch_size = 32;
  std::string optimizer = "adam";  // adam | sgd
  double learning_rate = 1e-3;
  double clip_norm = 5.0;  // global-norm clip for recurrent models; 0 = off
  size_t patience = 10;    // early stopping; 0 = off
  size_t checkpoint_interval = 0;  // epoch snapshots every k epochs; 0 = none
  std::string selection_metric;    // empty = model default
  double threshold = 0.5;          // tag threshold for validation f1

  // canonical serialized form, written verbatim to config.snapshot
  std::string snapshot_text;
};

struct EpochRecord {
  size_t epoch = 0;
  double train_loss = 0.0;
  std::map<std::string, double> val_metrics;
  std::string selection_metric;
  double selection_value = 0.0;
};

// Run directory layout:
//   config.snapshot, history.jsonl (one epoch record per line),
//   checkpoints/epoch_<k>, best, predictions/val.<stream>.probs, run.json
struct RunRecord {
  std::string run_id;
  uint64_t seed = 0;
  std::string output_dir;
  std::vector<EpochRecord> history;
  std::vector<std::string> checkpoint_paths;
  std::string best_checkpoint;
  size_t best_epoch = 0;  // 0 = initial (untrained) model
  double best_value = 0.0;
  std::string selection_metric;
};

// The training loop: per epoch, train over all minibatches, evaluate on
// the validation set, snapshot as requested, and keep the best model under
// the selection metric. Deterministic for a given config and seed.
RunRecord train(const TrainConfig& config);

// Validation-style evaluation used inside train(); exposed for tests.
struct EvalResult {
  std::map<std::string, double> metrics;
  std::map<ensemble::Stream, std::vector<std::vector<double>>> predictions;
  std::vector<double> sentence_scores;
};

EvalResult evaluate_model(models::Model& model,
                          const std::vector<data::QESample>& samples,
                          const data::Field& src_field,
                          const data::Field& mt_field, size_t batch_size,
                          double threshold);

}  // namespace kiwi::trainer
