#include "kiwi/data/batch.hpp"

#include <algorithm>
#include <numeric>

#include "kiwi/numerics/tensor.hpp"

namespace kiwi::data {

std::vector<int> Field::numericalize(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(vocab->id(tok));
  return ids;
}

std::vector<std::string> Field::denumericalize(
    const std::vector<int>& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) tokens.push_back(vocab->token(id));
  return tokens;
}

std::vector<int> Batch::src_row(size_t b) const {
  return {src_ids.data.begin() + static_cast<long>(b * src_ids.cols),
          src_ids.data.begin() + static_cast<long>(b * src_ids.cols + src_len[b])};
}

std::vector<int> Batch::mt_row(size_t b) const {
  return {mt_ids.data.begin() + static_cast<long>(b * mt_ids.cols),
          mt_ids.data.begin() + static_cast<long>(b * mt_ids.cols + mt_len[b])};
}

namespace {

Batch build_batch(const std::vector<QESample>& samples,
                  const std::vector<size_t>& indices, const Field& src_field,
                  const Field& mt_field) {
  Batch batch;
  batch.size = indices.size();
  batch.sample_index = indices;

  size_t max_src = 1, max_mt = 1;
  bool any_mt_tags = false, any_gap_tags = false, any_src_tags = false,
       any_hter = false;
  for (size_t idx : indices) {
    const auto& s = samples[idx];
    max_src = std::max(max_src, s.src.size());
    max_mt = std::max(max_mt, s.mt.size());
    any_mt_tags |= s.mt_tags.has_value();
    any_gap_tags |= s.gap_tags.has_value();
    any_src_tags |= s.src_tags.has_value();
    any_hter |= s.hter.has_value();
  }

  const size_t b = indices.size();
  batch.src_ids = IdMatrix(b, max_src, kPadId);
  batch.mt_ids = IdMatrix(b, max_mt, kPadId);
  batch.src_mask = IdMatrix(b, max_src, 0);
  batch.mt_mask = IdMatrix(b, max_mt, 0);
  batch.aligned_src_pos = IdMatrix(b, max_mt, -1);
  batch.aligned_mt_pos = IdMatrix(b, max_src, -1);
  batch.aligned_src_ids = IdMatrix(b, max_mt, kUnalignedId);
  if (any_mt_tags) batch.mt_tags = IdMatrix(b, max_mt, -1);
  if (any_gap_tags) batch.gap_tags = IdMatrix(b, max_mt + 1, -1);
  if (any_src_tags) batch.src_tags = IdMatrix(b, max_src, -1);
  if (any_hter) batch.hter = std::vector<double>(b, 0.0);

  for (size_t r = 0; r < b; ++r) {
    const auto& s = samples[indices[r]];
    batch.src_len.push_back(s.src.size());
    batch.mt_len.push_back(s.mt.size());
    const auto src_ids = src_field.numericalize(s.src);
    const auto mt_ids = mt_field.numericalize(s.mt);
    for (size_t c = 0; c < src_ids.size(); ++c) {
      batch.src_ids.at(r, c) = src_ids[c];
      batch.src_mask.at(r, c) = 1;
    }
    for (size_t c = 0; c < mt_ids.size(); ++c) {
      batch.mt_ids.at(r, c) = mt_ids[c];
      batch.mt_mask.at(r, c) = 1;
    }
    // Leftmost aligned counterpart per position.
    for (const auto& [si, mi] : s.alignments) {
      auto& sp = batch.aligned_src_pos.at(r, static_cast<size_t>(mi));
      if (sp < 0 || si < sp) sp = si;
      auto& mp = batch.aligned_mt_pos.at(r, static_cast<size_t>(si));
      if (mp < 0 || mi < mp) mp = mi;
    }
    for (size_t c = 0; c < s.mt.size(); ++c) {
      const int sp = batch.aligned_src_pos.at(r, c);
      if (sp >= 0) batch.aligned_src_ids.at(r, c) = src_ids[static_cast<size_t>(sp)];
    }
    if (batch.mt_tags && s.mt_tags)
      for (size_t c = 0; c < s.mt_tags->size(); ++c)
        batch.mt_tags->at(r, c) = static_cast<int>((*s.mt_tags)[c]);
    if (batch.gap_tags && s.gap_tags)
      for (size_t c = 0; c < s.gap_tags->size(); ++c)
        batch.gap_tags->at(r, c) = static_cast<int>((*s.gap_tags)[c]);
    if (batch.src_tags && s.src_tags)
      for (size_t c = 0; c < s.src_tags->size(); ++c)
        batch.src_tags->at(r, c) = static_cast<int>((*s.src_tags)[c]);
    if (batch.hter && s.hter) (*batch.hter)[r] = *s.hter;
  }
  return batch;
}

}  // namespace

std::vector<Batch> make_batches(const std::vector<QESample>& samples,
                                const Field& src_field, const Field& mt_field,
                                const BatchOptions& options) {
  if (options.batch_size < 1)
    throw DataError("batch size must be at least 1");

  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  if (options.shuffle) {
    // Mix seed and epoch so each epoch gets its own deterministic order.
    numerics::UniformSampler rng(options.seed * 0x9E3779B97F4A7C15ULL +
                                 (options.epoch + 1) * 0xD1B54A32D192ED03ULL);
    numerics::deterministic_shuffle(order, rng);
  }

  std::vector<Batch> batches;
  for (size_t start = 0; start < order.size(); start += options.batch_size) {
    const size_t end = std::min(order.size(), start + options.batch_size);
    std::vector<size_t> indices(order.begin() + static_cast<long>(start),
                                order.begin() + static_cast<long>(end));
    batches.push_back(build_batch(samples, indices, src_field, mt_field));
  }
  return batches;
}

}  // namespace kiwi::data
