#pragma once

// Shared helpers for model/trainer tests: small synthetic corpora with a
// deterministic word-for-word translation and seeded corruption, labeled
// through the labels module.

#include <memory>
#include <string>
#include <vector>

#include "kiwi/data/batch.hpp"
#include "kiwi/labels/labels.hpp"
#include "kiwi/numerics/tensor.hpp"

namespace kiwi::testsup {

struct Corpus {
  std::vector<data::QESample> samples;
  data::Field src_field;
  data::Field mt_field;
};

inline std::string src_word(size_t i) { return "src" + std::to_string(i); }
inline std::string tgt_word(size_t i) { return "tgt" + std::to_string(i); }

// Source sentences over a 20-word vocabulary; the post-edit is the mapped
// translation and the MT side carries seeded substitutions, deletions and
// insertions. Gold tags and HTER come from the labels module.
inline std::vector<data::QESample> synthetic_samples(size_t n, uint64_t seed,
                                                     double max_corruption,
                                                     size_t vocab = 20,
                                                     size_t max_len = 8) {
  numerics::UniformSampler rng(seed);
  std::vector<data::QESample> samples;
  for (size_t s = 0; s < n; ++s) {
    const size_t len = 2 + rng.next_index(max_len - 1);
    const double rate = rng.next() * max_corruption;
    data::QESample sample;
    std::vector<std::string> pe;
    for (size_t i = 0; i < len; ++i) {
      const size_t w = rng.next_index(vocab);
      sample.src.push_back(src_word(w));
      pe.push_back(tgt_word(w));
    }
    for (size_t i = 0; i < len; ++i) {
      const double r = rng.next();
      if (r < rate * 0.25) {
        // translation dropped
      } else if (r < rate * 0.75) {
        size_t wrong = rng.next_index(vocab);
        if (tgt_word(wrong) == pe[i]) wrong = (wrong + 1) % vocab;
        sample.alignments.emplace_back(static_cast<int>(i),
                                       static_cast<int>(sample.mt.size()));
        sample.mt.push_back(tgt_word(wrong));
      } else {
        sample.alignments.emplace_back(static_cast<int>(i),
                                       static_cast<int>(sample.mt.size()));
        sample.mt.push_back(pe[i]);
      }
      if (rng.next() < rate * 0.25)
        sample.mt.push_back(tgt_word(rng.next_index(vocab)));
    }
    if (sample.mt.empty()) {
      sample.alignments.emplace_back(0, 0);
      sample.mt.push_back(pe[0]);
    }
    const auto labeled = labels::label_sentence(sample.mt, pe,
                                                sample.src.size(),
                                                sample.alignments);
    sample.mt_tags = labeled.tags.mt_tags;
    sample.gap_tags = labeled.tags.gap_tags;
    sample.src_tags = labeled.tags.src_tags;
    sample.hter = labeled.hter;
    samples.push_back(std::move(sample));
  }
  return samples;
}

inline Corpus make_corpus(std::vector<data::QESample> samples) {
  Corpus corpus;
  std::vector<std::vector<std::string>> src_sents, mt_sents;
  for (const auto& s : samples) {
    src_sents.push_back(s.src);
    mt_sents.push_back(s.mt);
  }
  corpus.samples = std::move(samples);
  corpus.src_field = data::Field{
      std::make_shared<data::Vocabulary>(data::build_vocab(src_sents, 1)), 1};
  corpus.mt_field = data::Field{
      std::make_shared<data::Vocabulary>(data::build_vocab(mt_sents, 1)), 1};
  return corpus;
}

inline Corpus synthetic_corpus(size_t n, uint64_t seed,
                               double max_corruption = 0.5) {
  return make_corpus(synthetic_samples(n, seed, max_corruption));
}

// Copy language: the MT side repeats the source except for a token-for-
// token rename, no corruption. Used for predictor training tests.
inline Corpus copy_corpus(size_t n, uint64_t seed, size_t vocab = 20,
                          size_t max_len = 8) {
  return make_corpus(synthetic_samples(n, seed, 0.0, vocab, max_len));
}

inline data::Batch single_batch(const Corpus& corpus) {
  data::BatchOptions options;
  options.batch_size = corpus.samples.size();
  options.shuffle = false;
  return data::make_batches(corpus.samples, corpus.src_field, corpus.mt_field,
                            options)[0];
}

}  // namespace kiwi::testsup
