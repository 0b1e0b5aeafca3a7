#include "kiwi/models/nuqe.hpp"

#include "kiwi/common.hpp"

namespace kiwi::models {

using numerics::make_parameter;

NuqeModel::NuqeModel(WordTask task, const NuqeOptions& options,
                     size_t src_vocab, size_t tgt_vocab, uint64_t seed)
    : task_(task), options_(options) {
  if (options.window < 1 || options.window % 2 == 0)
    throw ConfigError(strformat("window size must be odd and at least 1, got %d",
                                options.window));
  UniformSampler rng(seed);
  const size_t d = options.embedding_dim;
  const size_t h = options.hidden_dim;
  const size_t r = options.rnn_dim;
  tgt_embed_ = make_parameter("embed.target", {tgt_vocab, d}, d, rng);
  src_embed_ = make_parameter("embed.source", {src_vocab, d}, d, rng);
  const size_t input_dim = 2 * static_cast<size_t>(options.window) * d;
  ff1_a_ = Linear("ff1a", input_dim, h, rng);
  ff1_b_ = Linear("ff1b", h, h, rng);
  gru_fwd_ = GruCell("gru.fwd", h, r, rng);
  gru_bwd_ = GruCell("gru.bwd", h, r, rng);
  ff2_a_ = Linear("ff2a", 2 * r, h, rng);
  ff2_b_ = Linear("ff2b", h, h, rng);
  output_ = Linear("output", h, 2, rng);
  params_ = {tgt_embed_, src_embed_};
  ff1_a_.collect(params_);
  ff1_b_.collect(params_);
  gru_fwd_.collect(params_);
  gru_bwd_.collect(params_);
  ff2_a_.collect(params_);
  ff2_b_.collect(params_);
  output_.collect(params_);
}

BatchOutput NuqeModel::forward_batch(Graph& g, const data::Batch& batch,
                                     bool with_loss) {
  g.register_parameters(params_);
  BatchOutput out;
  const auto features = window_features(batch, task_, options_.window);
  if (features.positions == 0) return out;

  const size_t w = static_cast<size_t>(options_.window);
  const size_t d = options_.embedding_dim;
  TensorPtr own_table = task_ == WordTask::Source ? src_embed_ : tgt_embed_;
  TensorPtr aligned_table = task_ == WordTask::Source ? tgt_embed_ : src_embed_;

  auto own = g.reshape(g.embedding_lookup(own_table, features.own_ids),
                       {features.positions, w * d});
  auto aligned =
      g.reshape(g.embedding_lookup(aligned_table, features.aligned_ids),
                {features.positions, w * d});
  auto x = g.concat_cols({own, aligned});
  auto ff1 = g.relu(ff1_b_(g, g.relu(ff1_a_(g, x))));

  // The GRU runs within each sentence; sentences stay independent.
  std::vector<TensorPtr> recurrent_rows;
  recurrent_rows.reserve(batch.size);
  for (size_t r = 0; r < batch.size; ++r) {
    const size_t begin = features.sentence_offsets[r];
    const size_t count = features.sentence_offsets[r + 1] - begin;
    if (count == 0) continue;
    auto rows = g.slice_rows(ff1, begin, count);
    auto fwd = run_gru(g, gru_fwd_, rows, false);
    auto bwd = run_gru(g, gru_bwd_, rows, true);
    std::vector<TensorPtr> joined(count);
    for (size_t t = 0; t < count; ++t)
      joined[t] = g.concat_cols({fwd[t], bwd[t]});
    recurrent_rows.push_back(g.concat_rows(joined));
  }
  auto recur = g.concat_rows(recurrent_rows);

  auto ff2 = g.relu(ff2_b_(g, g.relu(ff2_a_(g, recur))));
  auto logits = output_(g, ff2);
  auto probs = g.softmax_rows(logits);

  for (size_t r = 0; r < batch.size; ++r) {
    const size_t begin = features.sentence_offsets[r];
    const size_t end = features.sentence_offsets[r + 1];
    std::vector<double> bad;
    bad.reserve(end - begin);
    for (size_t p = begin; p < end; ++p) bad.push_back(probs->at(p, 1));
    out.word_bad_probs.push_back(std::move(bad));
  }

  if (with_loss && !features.gold.empty()) {
    out.loss = g.cross_entropy(logits, features.gold);
    out.loss_positions = features.positions;
  }
  return out;
}

nlohmann::json NuqeModel::manifest() const {
  return {{"task", task_name(task_)},
          {"window", options_.window},
          {"embedding_dim", options_.embedding_dim},
          {"hidden_dim", options_.hidden_dim},
          {"rnn_dim", options_.rnn_dim}};
}

}  // namespace kiwi::models
