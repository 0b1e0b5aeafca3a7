#pragma once

#include <memory>
#include <optional>

#include "kiwi/data/corpus.hpp"
#include "kiwi/data/vocab.hpp"

namespace kiwi::data {

// How one data stream is turned into ids: whitespace tokens, a shared
// vocabulary, the fixed special symbols, and a frequency threshold.
struct Field {
  std::shared_ptr<Vocabulary> vocab;
  int min_freq = 1;

  std::vector<int> numericalize(const std::vector<std::string>& tokens) const;
  std::vector<std::string> denumericalize(const std::vector<int>& ids) const;
};

// Row-major integer matrix with explicit dimensions.
struct IdMatrix {
  size_t rows = 0, cols = 0;
  std::vector<int> data;

  IdMatrix() = default;
  IdMatrix(size_t r, size_t c, int fill) : rows(r), cols(c), data(r * c, fill) {}
  int& at(size_t r, size_t c) { return data[r * cols + c]; }
  int at(size_t r, size_t c) const { return data[r * cols + c]; }
};

// A padded minibatch. Masks are 1 exactly on non-pad positions and each
// row's mask sum equals the true length.
struct Batch {
  size_t size = 0;

  IdMatrix src_ids;  // [B, max_src]
  IdMatrix mt_ids;   // [B, max_mt]
  std::vector<size_t> src_len;
  std::vector<size_t> mt_len;
  IdMatrix src_mask;  // 0/1
  IdMatrix mt_mask;

  // Leftmost aligned counterpart position, or -1 when unaligned.
  IdMatrix aligned_src_pos;  // [B, max_mt] source position per MT token
  IdMatrix aligned_mt_pos;   // [B, max_src] MT position per source token
  // Aligned source token id per MT position (kUnalignedId fallback).
  IdMatrix aligned_src_ids;  // [B, max_mt]

  // Gold annotations, when the samples carry them. Tag cells hold the Tag
  // value (0/1) on real positions and -1 on padding.
  std::optional<IdMatrix> mt_tags;   // [B, max_mt]
  std::optional<IdMatrix> gap_tags;  // [B, max_mt + 1]
  std::optional<IdMatrix> src_tags;  // [B, max_src]
  std::optional<std::vector<double>> hter;

  // Index of each row in the original sample list.
  std::vector<size_t> sample_index;

  std::vector<int> src_row(size_t b) const;  // unpadded ids
  std::vector<int> mt_row(size_t b) const;
};

struct BatchOptions {
  size_t batch_size = 32;
  bool shuffle = true;
  uint64_t seed = 1;
  size_t epoch = 0;  // shuffling is a pure function of (seed, epoch)
};

// Every sample appears exactly once; order is deterministic given
// (seed, epoch). Aligned-source lookups resolve to the leftmost aligned
// index, with the unaligned symbol as fallback.
std::vector<Batch> make_batches(const std::vector<QESample>& samples,
                                const Field& src_field, const Field& mt_field,
                                const BatchOptions& options);

}  // namespace kiwi::data
