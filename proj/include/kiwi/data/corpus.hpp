#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kiwi/tag.hpp"

namespace kiwi::data {

// One line of a source/MT/post-edit corpus with word alignments.
struct SentenceTriplet {
  std::vector<std::string> src;
  std::vector<std::string> mt;
  std::vector<std::string> pe;
  std::vector<std::pair<int, int>> alignments;  // (src index, mt index)
};

// One training/evaluation sample: source + MT plus whatever gold
// annotations the corpus provides.
struct QESample {
  std::vector<std::string> src;
  std::vector<std::string> mt;
  std::vector<std::pair<int, int>> alignments;
  std::optional<TagVector> mt_tags;      // |mt| tags
  std::optional<TagVector> gap_tags;     // |mt| + 1 tags
  std::optional<TagVector> src_tags;     // |src| tags
  std::optional<double> hter;            // in [0, 1]
};

struct LoadOptions {
  size_t max_length = 200;  // sentences longer than this are rejected
};

struct CorpusPaths {
  std::string src;          // required
  std::string mt;           // required (parallel target for predictor data)
  std::string alignments;   // optional, "i-j" pairs per line
  std::string mt_tags;      // optional, N tags per line
  std::string gap_tags;     // optional, N+1 tags per line
  std::string src_tags;     // optional, M tags per line
  std::string hter;         // optional, one decimal in [0, 1] per line
};

// Whitespace tokenization of one line.
std::vector<std::string> tokenize(const std::string& line);

// Reads a UTF-8 file with one whitespace-tokenized sentence per line.
std::vector<std::vector<std::string>> read_token_file(const std::string& path);

// Parses fast_align-style "i-j" pairs (0-based). Throws DataError on a
// malformed token or an index outside the sentence bounds.
std::vector<std::pair<int, int>> parse_alignments(const std::string& line,
                                                  size_t src_len,
                                                  size_t mt_len);

// Loads parallel files into samples. All present files must have the same
// line count; tag lines must satisfy the per-stream length rules. Errors
// report 1-based line numbers.
std::vector<QESample> load_qe_corpus(const CorpusPaths& paths,
                                     const LoadOptions& options = {});

std::vector<SentenceTriplet> load_triplets(const std::string& src_path,
                                           const std::string& mt_path,
                                           const std::string& pe_path,
                                           const std::string& alignments_path,
                                           const LoadOptions& options = {});

}  // namespace kiwi::data
