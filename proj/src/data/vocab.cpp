#include "kiwi/data/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace kiwi::data {

const char* const kPadToken = "<pad>";
const char* const kUnkToken = "<unk>";
const char* const kStartToken = "<s>";
const char* const kStopToken = "</s>";
const char* const kUnalignedToken = "<unaligned>";

Vocabulary::Vocabulary() {
  for (const char* tok :
       {kPadToken, kUnkToken, kStartToken, kStopToken, kUnalignedToken}) {
    token_to_id_.emplace(tok, static_cast<int>(id_to_token_.size()));
    id_to_token_.emplace_back(tok);
  }
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) > 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<size_t>(id) >= id_to_token_.size())
    throw DataError(strformat("vocabulary id %d out of range", id));
  return id_to_token_[static_cast<size_t>(id)];
}

int Vocabulary::add(const std::string& token) {
  auto it = token_to_id_.find(token);
  if (it != token_to_id_.end()) return it->second;
  const int id = static_cast<int>(id_to_token_.size());
  token_to_id_.emplace(token, id);
  id_to_token_.push_back(token);
  return id;
}

uint64_t Vocabulary::content_hash() const {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& tok : id_to_token_) {
    for (char c : tok) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ULL;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 0x100000001B3ULL;
  }
  return h;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write vocabulary to " + path);
  for (const auto& tok : id_to_token_) f << tok << '\n';
  f.flush();
  if (!f) throw DataError("write failed for vocabulary " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open vocabulary " + path);
  Vocabulary vocab;
  std::string line;
  int index = 0;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (index < kNumSpecials) {
      if (line != vocab.id_to_token_[static_cast<size_t>(index)])
        throw DataError(strformat(
            "vocabulary %s: special token at index %d is '%s', expected '%s'",
            path.c_str(), index, line.c_str(),
            vocab.id_to_token_[static_cast<size_t>(index)].c_str()));
    } else {
      if (vocab.contains(line))
        throw DataError(strformat("vocabulary %s: duplicate token '%s'",
                                  path.c_str(), line.c_str()));
      vocab.add(line);
    }
    ++index;
  }
  if (index < kNumSpecials)
    throw DataError("vocabulary " + path + " is missing special tokens");
  return vocab;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& sentences,
                       int min_freq) {
  // std::map keeps the tie-break (frequency desc, token asc) deterministic.
  std::map<std::string, long> freq;
  for (const auto& sent : sentences)
    for (const auto& tok : sent) ++freq[tok];

  std::vector<std::pair<std::string, long>> entries(freq.begin(), freq.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });

  Vocabulary vocab;
  for (const auto& [token, count] : entries) {
    if (count < min_freq) continue;
    if (vocab.contains(token)) continue;  // corpus token spelled like a special
    vocab.add(token);
  }
  return vocab;
}

}  // namespace kiwi::data
