#include "kiwi/trainer/checkpoint_dir.hpp"

#include <filesystem>
#include <fstream>

#include "kiwi/models/estimator.hpp"
#include "kiwi/models/nuqe.hpp"
#include "kiwi/models/quetch.hpp"
#include "kiwi/numerics/checkpoint.hpp"

namespace kiwi::trainer {

namespace fs = std::filesystem;

namespace {

std::string hash_hex(uint64_t h) { return strformat("%016llx", (unsigned long long)h); }

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw TrainError("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw TrainError(strformat("%s: invalid JSON (%s)", path.c_str(), e.what()));
  }
  return j;
}

}  // namespace

void save_checkpoint(const std::string& dir, const models::Model& model,
                     const data::Vocabulary& src_vocab,
                     const data::Vocabulary& mt_vocab) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw TrainError(strformat("cannot create checkpoint directory %s: %s",
                               dir.c_str(), ec.message().c_str()));
  nlohmann::json manifest = {
      {"format", kManifestVersion},
      {"kind", model.kind()},
      {"model", model.manifest()},
      {"vocab_hash_source", hash_hex(src_vocab.content_hash())},
      {"vocab_hash_target", hash_hex(mt_vocab.content_hash())},
  };
  std::ofstream mf(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!mf) throw TrainError("cannot write manifest in " + dir);
  mf << manifest.dump(2) << '\n';
  mf.flush();
  if (!mf) throw TrainError("write failed for manifest in " + dir);
  numerics::save_parameters((fs::path(dir) / "params.bin").string(),
                            model.all_parameters());
  src_vocab.save((fs::path(dir) / "vocab.source.txt").string());
  mt_vocab.save((fs::path(dir) / "vocab.target.txt").string());
}

std::shared_ptr<models::Model> model_from_manifest(
    const std::string& kind, const nlohmann::json& m, size_t src_vocab_size,
    size_t mt_vocab_size) {
  try {
    if (kind == "quetch") {
      models::QuetchOptions opts;
      opts.window = m.at("window").get<int>();
      opts.embedding_dim = m.at("embedding_dim").get<size_t>();
      opts.hidden_dim = m.at("hidden_dim").get<size_t>();
      return std::make_shared<models::QuetchModel>(
          models::parse_task(m.at("task").get<std::string>()), opts,
          src_vocab_size, mt_vocab_size, 0);
    }
    if (kind == "nuqe") {
      models::NuqeOptions opts;
      opts.window = m.at("window").get<int>();
      opts.embedding_dim = m.at("embedding_dim").get<size_t>();
      opts.hidden_dim = m.at("hidden_dim").get<size_t>();
      opts.rnn_dim = m.at("rnn_dim").get<size_t>();
      return std::make_shared<models::NuqeModel>(
          models::parse_task(m.at("task").get<std::string>()), opts,
          src_vocab_size, mt_vocab_size, 0);
    }
    if (kind == "predictor") {
      models::PredictorOptions opts;
      opts.embedding_dim = m.at("embedding_dim").get<size_t>();
      opts.lstm_dim = m.at("lstm_dim").get<size_t>();
      opts.hidden_dim = m.at("hidden_dim").get<size_t>();
      const auto direction =
          models::parse_direction(m.at("direction").get<std::string>());
      const size_t enc = direction == models::Direction::SrcToMt
                             ? src_vocab_size
                             : mt_vocab_size;
      const size_t out = direction == models::Direction::SrcToMt
                             ? mt_vocab_size
                             : src_vocab_size;
      return std::make_shared<models::PredictorModel>(opts, enc, out,
                                                      direction, 0);
    }
    if (kind == "estimator") {
      const auto& pm = m.at("predictor");
      auto predictor = std::static_pointer_cast<models::PredictorModel>(
          model_from_manifest("predictor", pm, src_vocab_size,
                              mt_vocab_size));
      models::EstimatorOptions opts;
      opts.projection_dim = m.at("projection_dim").get<size_t>();
      opts.lstm_dim = m.at("lstm_dim").get<size_t>();
      opts.multitask_weight = m.at("multitask_weight").get<double>();
      opts.fine_tune_predictor = m.at("fine_tune_predictor").get<bool>();
      opts.task = models::parse_task(m.at("task").get<std::string>());
      return std::make_shared<models::EstimatorModel>(opts, predictor, 0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw TrainError(strformat("manifest for kind '%s' is malformed: %s",
                               kind.c_str(), e.what()));
  }
  throw TrainError(strformat("unknown architecture kind '%s' in manifest",
                             kind.c_str()));
}

LoadedCheckpoint load_checkpoint(const std::string& dir) {
  const auto manifest = read_json((fs::path(dir) / "manifest.json").string());
  if (!manifest.contains("format") ||
      manifest["format"].get<int>() != kManifestVersion)
    throw TrainError(strformat("checkpoint %s: unsupported manifest version",
                               dir.c_str()));

  LoadedCheckpoint loaded;
  loaded.manifest = manifest;
  loaded.src_vocab = std::make_shared<data::Vocabulary>(
      data::Vocabulary::load((fs::path(dir) / "vocab.source.txt").string()));
  loaded.mt_vocab = std::make_shared<data::Vocabulary>(
      data::Vocabulary::load((fs::path(dir) / "vocab.target.txt").string()));

  if (hash_hex(loaded.src_vocab->content_hash()) !=
          manifest.at("vocab_hash_source").get<std::string>() ||
      hash_hex(loaded.mt_vocab->content_hash()) !=
          manifest.at("vocab_hash_target").get<std::string>())
    throw TrainError(strformat(
        "checkpoint %s: vocabulary files do not match manifest hashes",
        dir.c_str()));

  loaded.model = model_from_manifest(
      manifest.at("kind").get<std::string>(), manifest.at("model"),
      loaded.src_vocab->size(), loaded.mt_vocab->size());
  numerics::load_parameters_into((fs::path(dir) / "params.bin").string(),
                                 loaded.model->all_parameters());
  return loaded;
}

}  // namespace kiwi::trainer
