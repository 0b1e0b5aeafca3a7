#include "kiwi/models/quetch.hpp"

#include "kiwi/common.hpp"

namespace kiwi::models {

using numerics::make_parameter;

QuetchModel::QuetchModel(WordTask task, const QuetchOptions& options,
                         size_t src_vocab, size_t tgt_vocab, uint64_t seed)
    : task_(task), options_(options) {
  if (options.window < 1 || options.window % 2 == 0)
    throw ConfigError(strformat("window size must be odd and at least 1, got %d",
                                options.window));
  UniformSampler rng(seed);
  const size_t d = options.embedding_dim;
  tgt_embed_ = make_parameter("embed.target", {tgt_vocab, d}, d, rng);
  src_embed_ = make_parameter("embed.source", {src_vocab, d}, d, rng);
  const size_t input_dim = 2 * static_cast<size_t>(options.window) * d;
  hidden_ = Linear("hidden", input_dim, options.hidden_dim, rng);
  output_ = Linear("output", options.hidden_dim, 2, rng);
  params_ = {tgt_embed_, src_embed_};
  hidden_.collect(params_);
  output_.collect(params_);
}

BatchOutput QuetchModel::forward_batch(Graph& g, const data::Batch& batch,
                                       bool with_loss) {
  g.register_parameters(params_);
  BatchOutput out;
  const auto features = window_features(batch, task_, options_.window);
  if (features.positions == 0) return out;

  const size_t w = static_cast<size_t>(options_.window);
  const size_t d = options_.embedding_dim;
  // Own-side table: MT embeddings for mt/gap positions, source embeddings
  // for source positions; aligned side uses the opposite table.
  TensorPtr own_table = task_ == WordTask::Source ? src_embed_ : tgt_embed_;
  TensorPtr aligned_table = task_ == WordTask::Source ? tgt_embed_ : src_embed_;

  auto own = g.reshape(g.embedding_lookup(own_table, features.own_ids),
                       {features.positions, w * d});
  auto aligned =
      g.reshape(g.embedding_lookup(aligned_table, features.aligned_ids),
                {features.positions, w * d});
  auto x = g.concat_cols({own, aligned});
  auto h = g.tanh(hidden_(g, x));
  auto logits = output_(g, h);
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

nlohmann::json QuetchModel::manifest() const {
  return {{"task", task_name(task_)},
          {"window", options_.window},
          {"embedding_dim", options_.embedding_dim},
          {"hidden_dim", options_.hidden_dim}};
}

}  // namespace kiwi::models
