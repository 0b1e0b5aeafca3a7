#include "kiwi/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace kiwi::cli {

namespace fs = std::filesystem;
using trainer::DataFiles;
using trainer::TrainConfig;

namespace {

[[noreturn]] void bad_key(const std::string& path) {
  throw ConfigError("unknown config key '" + path + "'");
}

void check_keys(const YAML::Node& node, const std::string& prefix,
                const std::set<std::string>& allowed) {
  if (!node || !node.IsMap()) return;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key))
      bad_key(prefix.empty() ? key : prefix + "." + key);
  }
}

template <typename T>
void read_value(const YAML::Node& node, const char* key, T& out,
                const std::string& prefix) {
  if (!node || !node[key]) return;
  try {
    out = node[key].template as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(strformat("config key '%s%s%s' has an invalid value",
                                prefix.c_str(), prefix.empty() ? "" : ".",
                                key));
  }
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  return (fs::path(base_dir) / path).lexically_normal().string();
}

void read_data_files(const YAML::Node& node, const std::string& prefix,
                     const std::string& base_dir, DataFiles& files) {
  if (!node) return;
  check_keys(node, prefix,
             {"src", "mt", "alignments", "mt-tags", "gap-tags", "source-tags",
              "hter"});
  read_value(node, "src", files.src, prefix);
  read_value(node, "mt", files.mt, prefix);
  read_value(node, "alignments", files.alignments, prefix);
  read_value(node, "mt-tags", files.mt_tags, prefix);
  read_value(node, "gap-tags", files.gap_tags, prefix);
  read_value(node, "source-tags", files.src_tags, prefix);
  read_value(node, "hter", files.hter, prefix);
  for (std::string* p : {&files.src, &files.mt, &files.alignments,
                         &files.mt_tags, &files.gap_tags, &files.src_tags,
                         &files.hter})
    *p = resolve_path(base_dir, *p);
}

}  // namespace

TrainConfig parse_train_config(const std::string& text,
                               const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(strformat("invalid YAML: %s", e.what()));
  }
  if (!root.IsMap()) throw ConfigError("config must be a YAML mapping");

  TrainConfig config;
  check_keys(root, "", {"seed", "output-dir", "model", "data", "training"});
  read_value(root, "seed", config.seed, "");
  read_value(root, "output-dir", config.output_dir, "");
  config.output_dir = resolve_path(base_dir, config.output_dir);

  const auto model = root["model"];
  if (!model) throw ConfigError("config is missing the 'model' section");
  check_keys(model, "model",
             {"kind", "task", "direction", "window", "embedding-dim",
              "hidden-dim", "rnn-dim", "lstm-dim", "projection-dim",
              "estimator-lstm-dim", "multitask-weight",
              "predictor-checkpoint", "fine-tune-predictor"});
  read_value(model, "kind", config.model_kind, "model");
  if (config.model_kind.empty())
    throw ConfigError("config key 'model.kind' is required");
  read_value(model, "task", config.task, "model");
  read_value(model, "direction", config.direction, "model");
  read_value(model, "window", config.window, "model");
  read_value(model, "embedding-dim", config.embedding_dim, "model");
  read_value(model, "hidden-dim", config.hidden_dim, "model");
  read_value(model, "rnn-dim", config.rnn_dim, "model");
  read_value(model, "lstm-dim", config.lstm_dim, "model");
  read_value(model, "projection-dim", config.projection_dim, "model");
  read_value(model, "estimator-lstm-dim", config.estimator_lstm_dim, "model");
  read_value(model, "multitask-weight", config.multitask_weight, "model");
  read_value(model, "predictor-checkpoint", config.predictor_checkpoint,
             "model");
  config.predictor_checkpoint =
      resolve_path(base_dir, config.predictor_checkpoint);
  read_value(model, "fine-tune-predictor", config.fine_tune_predictor,
             "model");

  const auto data = root["data"];
  if (!data) throw ConfigError("config is missing the 'data' section");
  check_keys(data, "data", {"min-frequency", "max-length", "train", "valid"});
  read_value(data, "min-frequency", config.min_frequency, "data");
  read_value(data, "max-length", config.max_length, "data");
  read_data_files(data["train"], "data.train", base_dir, config.train);
  read_data_files(data["valid"], "data.valid", base_dir, config.valid);

  const auto training = root["training"];
  check_keys(training, "training",
             {"epochs", "batch-size", "optimizer", "learning-rate",
              "clip-norm", "patience", "checkpoint-interval",
              "selection-metric", "threshold"});
  read_value(training, "epochs", config.epochs, "training");
  read_value(training, "batch-size", config.batch_size, "training");
  read_value(training, "optimizer", config.optimizer, "training");
  read_value(training, "learning-rate", config.learning_rate, "training");
  read_value(training, "clip-norm", config.clip_norm, "training");
  read_value(training, "patience", config.patience, "training");
  read_value(training, "checkpoint-interval", config.checkpoint_interval,
             "training");
  read_value(training, "selection-metric", config.selection_metric,
             "training");
  read_value(training, "threshold", config.threshold, "training");

  config.snapshot_text = serialize_config(config);
  return config;
}

TrainConfig load_train_config(const std::string& path,
                              std::optional<uint64_t> seed_override,
                              std::optional<std::string> output_dir_override) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << f.rdbuf();
  const std::string base_dir = fs::absolute(fs::path(path)).parent_path().string();
  auto config = parse_train_config(buffer.str(), base_dir);
  if (seed_override) config.seed = *seed_override;
  if (output_dir_override)
    config.output_dir =
        fs::absolute(fs::path(*output_dir_override)).lexically_normal().string();
  if (config.output_dir.empty())
    throw ConfigError(
        "no output directory: set 'output-dir' in the config or pass "
        "--output-dir");
  config.snapshot_text = serialize_config(config);
  return config;
}

std::string serialize_config(const TrainConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return strformat("%.17g", v); };
  out << "seed: " << c.seed << "\n";
  if (!c.output_dir.empty()) out << "output-dir: " << c.output_dir << "\n";
  out << "model:\n";
  out << "  kind: " << c.model_kind << "\n";
  out << "  task: " << c.task << "\n";
  out << "  direction: " << c.direction << "\n";
  out << "  window: " << c.window << "\n";
  out << "  embedding-dim: " << c.embedding_dim << "\n";
  out << "  hidden-dim: " << c.hidden_dim << "\n";
  out << "  rnn-dim: " << c.rnn_dim << "\n";
  out << "  lstm-dim: " << c.lstm_dim << "\n";
  out << "  projection-dim: " << c.projection_dim << "\n";
  out << "  estimator-lstm-dim: " << c.estimator_lstm_dim << "\n";
  out << "  multitask-weight: " << num(c.multitask_weight) << "\n";
  if (!c.predictor_checkpoint.empty())
    out << "  predictor-checkpoint: " << c.predictor_checkpoint << "\n";
  out << "  fine-tune-predictor: "
      << (c.fine_tune_predictor ? "true" : "false") << "\n";
  out << "data:\n";
  out << "  min-frequency: " << c.min_frequency << "\n";
  out << "  max-length: " << c.max_length << "\n";
  for (const auto& [name, files] :
       {std::pair<const char*, const DataFiles*>{"train", &c.train},
        std::pair<const char*, const DataFiles*>{"valid", &c.valid}}) {
    out << "  " << name << ":\n";
    if (!files->src.empty()) out << "    src: " << files->src << "\n";
    if (!files->mt.empty()) out << "    mt: " << files->mt << "\n";
    if (!files->alignments.empty())
      out << "    alignments: " << files->alignments << "\n";
    if (!files->mt_tags.empty())
      out << "    mt-tags: " << files->mt_tags << "\n";
    if (!files->gap_tags.empty())
      out << "    gap-tags: " << files->gap_tags << "\n";
    if (!files->src_tags.empty())
      out << "    source-tags: " << files->src_tags << "\n";
    if (!files->hter.empty()) out << "    hter: " << files->hter << "\n";
  }
  out << "training:\n";
  out << "  epochs: " << c.epochs << "\n";
  out << "  batch-size: " << c.batch_size << "\n";
  out << "  optimizer: " << c.optimizer << "\n";
  out << "  learning-rate: " << num(c.learning_rate) << "\n";
  out << "  clip-norm: " << num(c.clip_norm) << "\n";
  out << "  patience: " << c.patience << "\n";
  out << "  checkpoint-interval: " << c.checkpoint_interval << "\n";
  if (!c.selection_metric.empty())
    out << "  selection-metric: " << c.selection_metric << "\n";
  out << "  threshold: " << num(c.threshold) << "\n";
  return out.str();
}

}  // namespace kiwi::cli
