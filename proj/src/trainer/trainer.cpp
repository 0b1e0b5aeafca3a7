#include "kiwi/trainer/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "kiwi/metrics/metrics.hpp"
#include "kiwi/models/estimator.hpp"
#include "kiwi/models/nuqe.hpp"
#include "kiwi/models/quetch.hpp"
#include "kiwi/numerics/optimizer.hpp"
#include "kiwi/trainer/checkpoint_dir.hpp"

namespace kiwi::trainer {

namespace fs = std::filesystem;
using models::WordTask;

namespace {

// Exclusive lockfile guarding a run directory against concurrent writers.
class RunLock {
 public:
  explicit RunLock(const fs::path& dir) : path_(dir / "lock") {
    if (fs::exists(path_))
      throw TrainError(strformat(
          "run directory %s is locked by another run (remove %s if stale)",
          dir.string().c_str(), path_.string().c_str()));
    std::ofstream f(path_, std::ios::trunc);
    if (!f) throw TrainError("cannot create lockfile " + path_.string());
    f << "locked\n";
  }
  ~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
};

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  numerics::UniformSampler rng(seed ^ (salt * 0x9E3779B97F4A7C15ULL));
  return rng.next_u64();
}

std::string fnv_hex(const std::string& text) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return strformat("%016llx", (unsigned long long)h);
}

WordTask config_task(const TrainConfig& config) {
  return models::parse_task(config.task);
}

void require_file(const std::string& path, const char* role,
                  const char* split) {
  if (path.empty())
    throw ConfigError(strformat("%s data needs a %s file for this model",
                                split, role));
}

void validate_config(const TrainConfig& config) {
  const auto& kind = config.model_kind;
  if (kind != "quetch" && kind != "nuqe" && kind != "predictor" &&
      kind != "estimator")
    throw ConfigError("unknown model kind '" + kind + "'");
  if (config.output_dir.empty())
    throw ConfigError("training needs an output directory");
  if (config.optimizer != "adam" && config.optimizer != "sgd")
    throw ConfigError("unknown optimizer '" + config.optimizer + "'");
  for (const char* split : {"train", "valid"}) {
    const DataFiles& files = split == std::string("train") ? config.train
                                                           : config.valid;
    require_file(files.src, "source", split);
    require_file(files.mt, "target", split);
    if (kind == "quetch" || kind == "nuqe") {
      const WordTask task = config_task(config);
      if (task == WordTask::Mt) require_file(files.mt_tags, "mt-tags", split);
      if (task == WordTask::Gaps)
        require_file(files.gap_tags, "gap-tags", split);
      if (task == WordTask::Source)
        require_file(files.src_tags, "source-tags", split);
    } else if (kind == "estimator") {
      const WordTask task = config_task(config);
      if (task == WordTask::Gaps)
        throw ConfigError("the estimator does not support the gap task");
      const std::string& tags =
          task == WordTask::Source ? files.src_tags : files.mt_tags;
      if (tags.empty() && files.hter.empty())
        throw ConfigError(strformat(
            "%s data for the estimator needs gold tags, scores, or both",
            split));
    }
  }
}

std::vector<data::QESample> load_split(const TrainConfig& config,
                                       const DataFiles& files) {
  data::CorpusPaths paths;
  paths.src = files.src;
  paths.mt = files.mt;
  paths.alignments = files.alignments;
  paths.mt_tags = files.mt_tags;
  paths.gap_tags = files.gap_tags;
  paths.src_tags = files.src_tags;
  paths.hter = files.hter;
  data::LoadOptions options;
  options.max_length = config.max_length;
  return data::load_qe_corpus(paths, options);
}

std::string default_selection_metric(const TrainConfig& config) {
  if (config.model_kind == "predictor") return "accuracy";
  if (config.model_kind == "estimator")
    return config.valid.hter.empty() ? "f1_mult" : "pearson";
  return "f1_mult";
}

ensemble::Stream token_stream(const models::Model& model) {
  if (model.kind() == "quetch")
    return static_cast<const models::QuetchModel&>(model).task() ==
                   WordTask::Source
               ? ensemble::Stream::Source
               : static_cast<const models::QuetchModel&>(model).task() ==
                         WordTask::Gaps
                     ? ensemble::Stream::Gaps
                     : ensemble::Stream::Mt;
  if (model.kind() == "nuqe") {
    const auto task = static_cast<const models::NuqeModel&>(model).task();
    if (task == WordTask::Gaps) return ensemble::Stream::Gaps;
    if (task == WordTask::Source) return ensemble::Stream::Source;
    return ensemble::Stream::Mt;
  }
  if (model.kind() == "estimator")
    return static_cast<const models::EstimatorModel&>(model).task() ==
                   WordTask::Source
               ? ensemble::Stream::Source
               : ensemble::Stream::Mt;
  throw TrainError("model kind '" + model.kind() + "' has no token stream");
}

const std::optional<TagVector>& gold_tags_for_stream(
    const data::QESample& sample, ensemble::Stream stream) {
  switch (stream) {
    case ensemble::Stream::Gaps: return sample.gap_tags;
    case ensemble::Stream::Source: return sample.src_tags;
    default: return sample.mt_tags;
  }
}

nlohmann::json epoch_to_json(const EpochRecord& record) {
  nlohmann::json j;
  j["epoch"] = record.epoch;
  j["train_loss"] = record.train_loss;
  j["selection"] = {{"metric", record.selection_metric},
                    {"value", record.selection_value}};
  j["val"] = record.val_metrics;
  return j;
}

}  // namespace

EvalResult evaluate_model(models::Model& model,
                          const std::vector<data::QESample>& samples,
                          const data::Field& src_field,
                          const data::Field& mt_field, size_t batch_size,
                          double threshold) {
  EvalResult result;
  data::BatchOptions options;
  options.batch_size = batch_size;
  options.shuffle = false;
  const auto batches = data::make_batches(samples, src_field, mt_field, options);

  double loss_sum = 0.0;
  size_t loss_batches = 0;
  size_t correct = 0, total = 0;
  std::vector<std::vector<double>> token_probs;
  std::vector<double> sentence_scores;
  for (const auto& batch : batches) {
    numerics::Graph g;
    auto out = model.forward_batch(g, batch, true);
    if (out.loss) {
      loss_sum += out.loss->value();
      ++loss_batches;
    }
    correct += out.tokens_correct;
    total += out.tokens_total;
    for (auto& row : out.word_bad_probs) token_probs.push_back(std::move(row));
    for (double s : out.sentence_scores) sentence_scores.push_back(s);
  }
  if (loss_batches > 0)
    result.metrics["loss"] = loss_sum / static_cast<double>(loss_batches);

  if (model.kind() == "predictor") {
    if (total > 0)
      result.metrics["accuracy"] =
          static_cast<double>(correct) / static_cast<double>(total);
    return result;
  }

  const auto stream = token_stream(model);
  result.predictions[stream] = token_probs;

  // Token-level scores against the gold stream, when present.
  TagVector gold_flat, pred_flat;
  bool all_gold = !samples.empty();
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& gold = gold_tags_for_stream(samples[i], stream);
    if (!gold) {
      all_gold = false;
      break;
    }
    const auto pred = ensemble::tags_from_probs(token_probs[i], threshold);
    if (pred.size() != gold->size())
      throw TrainError(strformat(
          "validation sentence %zu: %zu predictions for %zu gold tags", i + 1,
          pred.size(), gold->size()));
    gold_flat.insert(gold_flat.end(), gold->begin(), gold->end());
    pred_flat.insert(pred_flat.end(), pred.begin(), pred.end());
  }
  if (all_gold && !gold_flat.empty()) {
    const auto report = metrics::f1_mult(gold_flat, pred_flat);
    result.metrics["f1_ok"] = report.f1_ok;
    result.metrics["f1_bad"] = report.f1_bad;
    result.metrics["f1_mult"] = report.f1_mult;
  }

  if (model.kind() == "estimator") {
    result.sentence_scores = sentence_scores;
    result.predictions[ensemble::Stream::Hter] = {};
    std::vector<double> gold_scores;
    bool all_scores = !samples.empty();
    for (const auto& s : samples) {
      if (!s.hter) {
        all_scores = false;
        break;
      }
      gold_scores.push_back(*s.hter);
    }
    if (all_scores && gold_scores.size() >= 2) {
      result.metrics["pearson"] = metrics::pearson(gold_scores, sentence_scores);
      result.metrics["spearman"] =
          metrics::spearman(gold_scores, sentence_scores);
    }
  }
  return result;
}

RunRecord train(const TrainConfig& config) {
  validate_config(config);

  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw TrainError(strformat("cannot create run directory %s: %s",
                               out_dir.string().c_str(),
                               ec.message().c_str()));
  RunLock lock(out_dir);

  // Snapshot the configuration before anything can fail mid-run.
  {
    std::ofstream snap(out_dir / "config.snapshot", std::ios::trunc);
    if (!snap) throw TrainError("cannot write config.snapshot");
    snap << config.snapshot_text;
  }

  const auto train_samples = load_split(config, config.train);
  const auto valid_samples = load_split(config, config.valid);
  if (train_samples.empty()) throw DataError("training corpus is empty");

  // One master seed controls parameter init and batch shuffling.
  const uint64_t init_seed = mix_seed(config.seed, 1);
  const uint64_t shuffle_seed = mix_seed(config.seed, 2);

  // Vocabularies: built from the training corpus, or inherited from the
  // pretrained predictor so its embeddings stay meaningful.
  auto src_vocab = std::make_shared<data::Vocabulary>();
  auto mt_vocab = std::make_shared<data::Vocabulary>();
  std::shared_ptr<models::PredictorModel> pretrained;
  if (config.model_kind == "estimator" && !config.predictor_checkpoint.empty()) {
    auto loaded = load_checkpoint(config.predictor_checkpoint);
    if (loaded.model->kind() != "predictor")
      throw ConfigError(strformat(
          "predictor checkpoint %s holds a '%s' model",
          config.predictor_checkpoint.c_str(), loaded.model->kind().c_str()));
    pretrained = std::static_pointer_cast<models::PredictorModel>(loaded.model);
    src_vocab = loaded.src_vocab;
    mt_vocab = loaded.mt_vocab;
  } else {
    std::vector<std::vector<std::string>> src_sents, mt_sents;
    for (const auto& s : train_samples) {
      src_sents.push_back(s.src);
      mt_sents.push_back(s.mt);
    }
    *src_vocab = data::build_vocab(src_sents, config.min_frequency);
    *mt_vocab = data::build_vocab(mt_sents, config.min_frequency);
  }
  data::Field src_field{src_vocab, config.min_frequency};
  data::Field mt_field{mt_vocab, config.min_frequency};

  // Model construction.
  std::shared_ptr<models::Model> model;
  if (config.model_kind == "quetch") {
    models::QuetchOptions opts{config.window, config.embedding_dim,
                               config.hidden_dim};
    model = std::make_shared<models::QuetchModel>(
        config_task(config), opts, src_vocab->size(), mt_vocab->size(),
        init_seed);
  } else if (config.model_kind == "nuqe") {
    models::NuqeOptions opts{config.window, config.embedding_dim,
                             config.hidden_dim, config.rnn_dim};
    model = std::make_shared<models::NuqeModel>(config_task(config), opts,
                                                src_vocab->size(),
                                                mt_vocab->size(), init_seed);
  } else if (config.model_kind == "predictor") {
    models::PredictorOptions opts{config.embedding_dim, config.lstm_dim,
                                  config.hidden_dim};
    const auto direction = models::parse_direction(config.direction);
    const size_t enc = direction == models::Direction::SrcToMt
                           ? src_vocab->size()
                           : mt_vocab->size();
    const size_t out = direction == models::Direction::SrcToMt
                           ? mt_vocab->size()
                           : src_vocab->size();
    model = std::make_shared<models::PredictorModel>(opts, enc, out,
                                                     direction, init_seed);
  } else {
    if (!pretrained) {
      models::PredictorOptions popts{config.embedding_dim, config.lstm_dim,
                                     config.hidden_dim};
      const auto direction = config_task(config) == WordTask::Source
                                 ? models::Direction::MtToSrc
                                 : models::Direction::SrcToMt;
      const size_t enc = direction == models::Direction::SrcToMt
                             ? src_vocab->size()
                             : mt_vocab->size();
      const size_t out = direction == models::Direction::SrcToMt
                             ? mt_vocab->size()
                             : src_vocab->size();
      pretrained = std::make_shared<models::PredictorModel>(
          popts, enc, out, direction, mix_seed(config.seed, 3));
    }
    models::EstimatorOptions opts;
    opts.projection_dim = config.projection_dim;
    opts.lstm_dim = config.estimator_lstm_dim;
    opts.multitask_weight = config.multitask_weight;
    // A predictor built from scratch in the same run is always trained.
    opts.fine_tune_predictor =
        config.fine_tune_predictor || config.predictor_checkpoint.empty();
    opts.task = config_task(config);
    model = std::make_shared<models::EstimatorModel>(opts, pretrained,
                                                     init_seed);
  }

  RunRecord record;
  record.seed = config.seed;
  record.output_dir = config.output_dir;
  record.selection_metric = config.selection_metric.empty()
                                ? default_selection_metric(config)
                                : config.selection_metric;
  record.run_id = fnv_hex(config.snapshot_text + config.model_kind +
                          config.task + strformat("#%llu",
                          (unsigned long long)config.seed));
  record.best_checkpoint = (out_dir / "best").string();

  std::ofstream history(out_dir / "history.jsonl", std::ios::trunc);
  if (!history) throw TrainError("cannot write history.jsonl");

  // The initial model is the best until validation says otherwise.
  save_checkpoint(record.best_checkpoint, *model, *src_vocab, *mt_vocab);
  double best_value = -std::numeric_limits<double>::infinity();

  auto optimizer = config.optimizer == "sgd"
                       ? numerics::Optimizer::sgd(config.learning_rate)
                       : numerics::Optimizer::adam(config.learning_rate);

  const fs::path predictions_dir = out_dir / "predictions";
  auto write_run_json = [&]() {
    nlohmann::json j = {
        {"run_id", record.run_id},
        {"seed", record.seed},
        {"selection_metric", record.selection_metric},
        {"best_epoch", record.best_epoch},
        {"best_value", record.best_value},
        {"best_checkpoint", record.best_checkpoint},
        {"checkpoints", record.checkpoint_paths},
        {"epochs_run", record.history.size()},
    };
    std::ofstream f(out_dir / "run.json", std::ios::trunc);
    f << j.dump(2) << '\n';
  };

  size_t epochs_since_best = 0;
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    data::BatchOptions options;
    options.batch_size = config.batch_size;
    options.shuffle = true;
    options.seed = shuffle_seed;
    options.epoch = epoch - 1;
    const auto batches =
        data::make_batches(train_samples, src_field, mt_field, options);

    double loss_sum = 0.0;
    size_t loss_count = 0;
    for (size_t step = 0; step < batches.size(); ++step) {
      numerics::Graph g;
      auto out = model->forward_batch(g, batches[step], true);
      if (!out.loss)
        throw TrainError(strformat(
            "epoch %zu step %zu: batch has no gold annotations to train on",
            epoch, step + 1));
      const double loss_value = out.loss->value();
      if (!std::isfinite(loss_value))
        throw TrainError(strformat(
            "non-finite loss at epoch %zu step %zu, aborting", epoch,
            step + 1));
      g.backward(out.loss);
      if (model->recurrent() && config.clip_norm > 0.0)
        numerics::clip_global_norm(model->parameters(), config.clip_norm);
      optimizer.step(model->parameters());
      loss_sum += loss_value;
      ++loss_count;
    }

    auto eval = evaluate_model(*model, valid_samples, src_field, mt_field,
                               config.batch_size, config.threshold);

    EpochRecord epoch_record;
    epoch_record.epoch = epoch;
    epoch_record.train_loss =
        loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    epoch_record.val_metrics = eval.metrics;
    epoch_record.selection_metric = record.selection_metric;
    auto it = eval.metrics.find(record.selection_metric);
    if (it == eval.metrics.end())
      throw TrainError(strformat(
          "selection metric '%s' is not produced by this model/validation "
          "data", record.selection_metric.c_str()));
    epoch_record.selection_value = it->second;
    record.history.push_back(epoch_record);
    history << epoch_to_json(epoch_record).dump() << '\n';
    history.flush();

    log::info(strformat("epoch %zu/%zu train_loss=%.6f %s=%.6f", epoch,
                        config.epochs, epoch_record.train_loss,
                        record.selection_metric.c_str(),
                        epoch_record.selection_value));

    if (config.checkpoint_interval > 0 &&
        epoch % config.checkpoint_interval == 0) {
      const auto path =
          (out_dir / "checkpoints" / strformat("epoch_%zu", epoch)).string();
      save_checkpoint(path, *model, *src_vocab, *mt_vocab);
      record.checkpoint_paths.push_back(path);
    }

    if (epoch_record.selection_value > best_value) {
      best_value = epoch_record.selection_value;
      record.best_epoch = epoch;
      record.best_value = best_value;
      save_checkpoint(record.best_checkpoint, *model, *src_vocab, *mt_vocab);
      fs::create_directories(predictions_dir);
      for (const auto& [stream, rows] : eval.predictions) {
        if (stream == ensemble::Stream::Hter) continue;
        ensemble::write_probs_file(
            (predictions_dir /
             ("val." + ensemble::stream_name(stream) + ".probs")).string(),
            rows);
      }
      if (!eval.sentence_scores.empty())
        ensemble::write_scores_file((predictions_dir / "val.hter.probs").string(),
                                    eval.sentence_scores);
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (config.patience > 0 && epochs_since_best >= config.patience) {
        log::info(strformat("early stopping after epoch %zu (no improvement "
                            "for %zu epochs)", epoch, config.patience));
        break;
      }
    }
    write_run_json();
  }

  write_run_json();
  return record;
}

}  // namespace kiwi::trainer
