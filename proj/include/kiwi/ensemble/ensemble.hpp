#pragma once

#include <map>
#include <string>
#include <vector>

#include "kiwi/data/corpus.hpp"
#include "kiwi/tag.hpp"

namespace kiwi::ensemble {

// Prediction streams match the gold-tag streams plus sentence scores.
enum class Stream { Mt, Gaps, Source, Hter };

std::string stream_name(Stream s);
Stream parse_stream(const std::string& name);

// Per-system predictions: BAD probabilities per labeled position for the
// word streams it covers, and optional sentence scores.
struct SystemPrediction {
  std::string system_id;
  std::map<Stream, std::vector<std::vector<double>>> word_probs;
  std::vector<double> sentence_scores;  // empty when absent
};

// Arithmetic mean per position and per sentence score across systems.
// All systems must cover identical shapes.
SystemPrediction average_predictions(
    const std::vector<SystemPrediction>& systems);

// BAD iff probability >= threshold.
TagVector tags_from_probs(const std::vector<double>& probs, double threshold);

// Prediction file format: one line per sentence, whitespace-separated
// decimals with 6 places.
void write_probs_file(const std::string& path,
                      const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_probs_file(const std::string& path);
void write_scores_file(const std::string& path,
                       const std::vector<double>& scores);
std::vector<double> read_scores_file(const std::string& path);

// One sparse feature row: names are template-qualified strings, values are
// 1.0 for indicators and the raw probability for probability features.
using FeatureRow = std::vector<std::pair<std::string, double>>;

// Lexical templates (word, neighbors, bigrams, aligned word and
// neighbors) plus each base system's BAD probability, raw and binned at
// width 0.1. token must index an MT word of the sample.
FeatureRow extract_features(const data::QESample& sample, size_t token,
                            const std::vector<SystemPrediction>& systems,
                            size_t sentence_index);

// Deterministic fold assignment for jackknifed stacker training data:
// fold id per sample, round-robin over a seeded shuffle.
std::vector<size_t> make_folds(size_t n_samples, size_t n_folds,
                               uint64_t seed);

}  // namespace kiwi::ensemble
