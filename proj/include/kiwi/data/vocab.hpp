#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "kiwi/common.hpp"

namespace kiwi::data {

// Special symbols occupy fixed vocabulary indices.
constexpr int kPadId = 0;
constexpr int kUnkId = 1;
constexpr int kStartId = 2;
constexpr int kStopId = 3;
constexpr int kUnalignedId = 4;
constexpr int kNumSpecials = 5;

extern const char* const kPadToken;
extern const char* const kUnkToken;
extern const char* const kStartToken;
extern const char* const kStopToken;
extern const char* const kUnalignedToken;

class Vocabulary {
 public:
  // Starts with the five specials at their fixed indices.
  Vocabulary();

  int id(const std::string& token) const;  // kUnkId for unknown tokens
  bool contains(const std::string& token) const;
  const std::string& token(int id) const;
  size_t size() const { return id_to_token_.size(); }

  // Appends a non-special token; returns its id.
  int add(const std::string& token);

  const std::vector<std::string>& tokens() const { return id_to_token_; }

  // FNV-1a over the token list; used by checkpoint manifests to detect
  // vocabulary mismatches.
  uint64_t content_hash() const;

  void save(const std::string& path) const;  // one token per line
  static Vocabulary load(const std::string& path);

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Tokens with frequency >= min_freq, ordered by (frequency desc, token asc)
// after the specials. Deterministic for a given corpus.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences,
                       int min_freq);

}  // namespace kiwi::data
