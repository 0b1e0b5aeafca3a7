// Generates the bundled synthetic QE corpus: a 20-word source language, a
// deterministic word-for-word translation as post-edit, and a machine
// translation derived from the post-edit by seeded substitutions,
// deletions and insertions. Alignments track surviving tokens.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kiwi/numerics/tensor.hpp"

namespace {

const std::vector<std::string> kSourceWords = {
    "alpha", "bravo", "charlie", "delta",  "echo",   "foxtrot", "golf",
    "hotel", "india", "juliett", "kilo",   "lima",   "mike",    "november",
    "oscar", "papa",  "quebec",  "romeo",  "sierra", "tango"};

const std::vector<std::string> kTargetWords = {
    "anton",   "berta",  "caesar",  "dora",    "emil",      "friedrich",
    "gustav",  "heinrich", "ida",   "julius",  "konrad",    "ludwig",
    "martha",  "nordpol", "otto",   "paula",   "quelle",    "richard",
    "siegfried", "theodor"};

struct Sentence {
  std::vector<std::string> src, mt, pe;
  std::vector<std::string> alignments;
};

Sentence make_sentence(kiwi::numerics::UniformSampler& rng,
                       double max_corruption) {
  Sentence s;
  const size_t len = 3 + static_cast<size_t>(rng.next_index(7));  // 3..9
  const double rate = rng.next() * max_corruption;
  std::vector<int> word_ids(len);
  for (auto& id : word_ids)
    id = static_cast<int>(rng.next_index(kSourceWords.size()));

  for (int id : word_ids) {
    s.src.push_back(kSourceWords[static_cast<size_t>(id)]);
    s.pe.push_back(kTargetWords[static_cast<size_t>(id)]);
  }

  for (size_t i = 0; i < len; ++i) {
    const double r = rng.next();
    if (r < rate * 0.25) {
      // dropped translation: the source word has no MT counterpart
    } else if (r < rate * 0.75) {
      // mistranslation: a wrong target word, still aligned to source i
      size_t wrong = rng.next_index(kTargetWords.size());
      if (kTargetWords[wrong] == s.pe[i])
        wrong = (wrong + 1) % kTargetWords.size();
      s.alignments.push_back(std::to_string(i) + "-" +
                             std::to_string(s.mt.size()));
      s.mt.push_back(kTargetWords[wrong]);
    } else {
      s.alignments.push_back(std::to_string(i) + "-" +
                             std::to_string(s.mt.size()));
      s.mt.push_back(s.pe[i]);
    }
    if (rng.next() < rate * 0.25) {
      // spurious token with no source counterpart
      s.mt.push_back(
          kTargetWords[static_cast<size_t>(rng.next_index(kTargetWords.size()))]);
    }
  }
  if (s.mt.empty()) {
    // keep every MT sentence non-empty so batches stay well-formed
    s.alignments.push_back("0-0");
    s.mt.push_back(s.pe[0]);
  }
  return s;
}

void write_split(const std::filesystem::path& dir, const std::string& split,
                 const std::vector<Sentence>& sentences) {
  auto open = [&](const std::string& suffix) {
    std::ofstream f(dir / (split + suffix), std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write corpus files");
    return f;
  };
  auto src = open(".src");
  auto mt = open(".mt");
  auto pe = open(".pe");
  auto align = open(".align");
  auto join = [](const std::vector<std::string>& tokens) {
    std::string line;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i) line += ' ';
      line += tokens[i];
    }
    return line;
  };
  for (const auto& s : sentences) {
    src << join(s.src) << '\n';
    mt << join(s.mt) << '\n';
    pe << join(s.pe) << '\n';
    align << join(s.alignments) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the bundled synthetic QE corpus"};
  std::string output_dir = "data/synthetic";
  size_t train_count = 160, valid_count = 40;
  uint64_t seed = 2024;
  double max_corruption = 0.6;
  app.add_option("--output-dir", output_dir, "corpus directory");
  app.add_option("--train", train_count, "training sentences");
  app.add_option("--valid", valid_count, "validation sentences");
  app.add_option("--seed", seed, "generation seed");
  app.add_option("--max-corruption", max_corruption,
                 "upper bound of the per-sentence corruption rate");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(output_dir);
  kiwi::numerics::UniformSampler rng(seed);
  std::vector<Sentence> train, valid;
  for (size_t i = 0; i < train_count; ++i)
    train.push_back(make_sentence(rng, max_corruption));
  for (size_t i = 0; i < valid_count; ++i)
    valid.push_back(make_sentence(rng, max_corruption));
  write_split(output_dir, "train", train);
  write_split(output_dir, "valid", valid);
  std::printf("wrote %zu train and %zu valid sentences to %s\n", train_count,
              valid_count, output_dir.c_str());
  return 0;
}
