#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "kiwi/data/vocab.hpp"
#include "kiwi/models/model.hpp"

namespace kiwi::trainer {

// A checkpoint is a directory:
//   manifest.json      architecture kind, dimensions, task, vocab hashes
//   params.bin         parameters in the binary parameter-file format
//   vocab.source.txt   source-side vocabulary, one token per line
//   vocab.target.txt   MT-side vocabulary
constexpr int kManifestVersion = 1;

struct LoadedCheckpoint {
  std::shared_ptr<models::Model> model;
  std::shared_ptr<data::Vocabulary> src_vocab;
  std::shared_ptr<data::Vocabulary> mt_vocab;
  nlohmann::json manifest;
};

void save_checkpoint(const std::string& dir, const models::Model& model,
                     const data::Vocabulary& src_vocab,
                     const data::Vocabulary& mt_vocab);

// Rebuilds the model from the manifest and loads its parameters. Throws on
// unknown architecture kinds, version mismatches, vocabulary-hash
// mismatches, and malformed parameter files.
LoadedCheckpoint load_checkpoint(const std::string& dir);

// Builds a model of the given kind from a manifest's model section.
std::shared_ptr<models::Model> model_from_manifest(
    const std::string& kind, const nlohmann::json& model_section,
    size_t src_vocab_size, size_t mt_vocab_size);

}  // namespace kiwi::trainer
