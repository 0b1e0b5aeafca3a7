#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "kiwi/models/estimator.hpp"
#include "kiwi/models/nuqe.hpp"
#include "kiwi/models/quetch.hpp"
#include "kiwi/numerics/grad_check.hpp"
#include "test_support.hpp"

using namespace kiwi;
using namespace kiwi::models;
using kiwi::numerics::GradCheckOptions;
using kiwi::numerics::Graph;
using kiwi::numerics::TensorPtr;

namespace {

testsup::Corpus tiny_corpus(uint64_t seed, size_t n = 2) {
  return testsup::make_corpus(
      testsup::synthetic_samples(n, seed, 0.6, 10, 5));
}

void check_prob_rows(const std::vector<std::vector<double>>& rows) {
  for (const auto& row : rows)
    for (double p : row) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      CHECK(std::isfinite(p));
    }
}

}  // namespace

TEST_CASE("quetch produces one distribution per labeled position") {
  auto corpus = tiny_corpus(1, 3);
  const auto batch = testsup::single_batch(corpus);
  QuetchOptions options{3, 8, 12};
  for (WordTask task : {WordTask::Mt, WordTask::Gaps, WordTask::Source}) {
    QuetchModel model(task, options, corpus.src_field.vocab->size(),
                      corpus.mt_field.vocab->size(), 5);
    Graph g;
    const auto out = model.forward_batch(g, batch, true);
    REQUIRE(out.word_bad_probs.size() == batch.size);
    size_t expected_positions = 0;
    for (size_t b = 0; b < batch.size; ++b) {
      size_t expect = task == WordTask::Mt
                          ? batch.mt_len[b]
                          : task == WordTask::Gaps ? batch.mt_len[b] + 1
                                                   : batch.src_len[b];
      CHECK(out.word_bad_probs[b].size() == expect);
      expected_positions += expect;
    }
    CHECK(out.loss_positions == expected_positions);
    check_prob_rows(out.word_bad_probs);
  }
}

TEST_CASE("quetch with all-zero parameters is maximally uncertain") {
  auto corpus = tiny_corpus(2);
  const auto batch = testsup::single_batch(corpus);
  QuetchModel model(WordTask::Mt, {3, 8, 12}, corpus.src_field.vocab->size(),
                    corpus.mt_field.vocab->size(), 5);
  for (auto& p : model.parameters())
    std::fill(p->values().begin(), p->values().end(), 0.0);
  Graph g;
  const auto out = model.forward_batch(g, batch, false);
  for (const auto& row : out.word_bad_probs)
    for (double p : row) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("masking: a 5-token and a 3-token sentence give 8 loss positions") {
  std::vector<data::QESample> samples(2);
  samples[0].src = {"s0", "s1"};
  samples[0].mt = {"a", "b", "c", "d", "e"};
  samples[0].mt_tags = TagVector(5, Tag::OK);
  samples[1].src = {"s2"};
  samples[1].mt = {"x", "y", "z"};
  samples[1].mt_tags = TagVector{Tag::OK, Tag::BAD, Tag::OK};
  auto corpus = testsup::make_corpus(std::move(samples));
  const auto batch = testsup::single_batch(corpus);
  QuetchModel model(WordTask::Mt, {3, 4, 6}, corpus.src_field.vocab->size(),
                    corpus.mt_field.vocab->size(), 1);
  Graph g;
  const auto out = model.forward_batch(g, batch, true);
  CHECK(out.loss_positions == 8);
  CHECK(out.word_bad_probs[0].size() == 5);
  CHECK(out.word_bad_probs[1].size() == 3);
}

TEST_CASE("even or non-positive windows are rejected") {
  auto corpus = tiny_corpus(3);
  CHECK_THROWS_AS(QuetchModel(WordTask::Mt, {2, 8, 8},
                              corpus.src_field.vocab->size(),
                              corpus.mt_field.vocab->size(), 1),
                  ConfigError);
  CHECK_THROWS_AS(QuetchModel(WordTask::Mt, {-1, 8, 8},
                              corpus.src_field.vocab->size(),
                              corpus.mt_field.vocab->size(), 1),
                  ConfigError);
  CHECK_THROWS_AS(NuqeModel(WordTask::Mt, {4, 8, 8, 4},
                            corpus.src_field.vocab->size(),
                            corpus.mt_field.vocab->size(), 1),
                  ConfigError);
}

TEST_CASE("task models never share parameters") {
  auto corpus = tiny_corpus(4);
  std::set<const numerics::Tensor*> seen;
  size_t total = 0;
  for (WordTask task : {WordTask::Mt, WordTask::Gaps, WordTask::Source}) {
    QuetchModel q(task, {3, 6, 8}, corpus.src_field.vocab->size(),
                  corpus.mt_field.vocab->size(), 7);
    NuqeModel n(task, {3, 6, 8, 4}, corpus.src_field.vocab->size(),
                corpus.mt_field.vocab->size(), 7);
    for (const auto& p : q.parameters()) {
      seen.insert(p.get());
      ++total;
    }
    for (const auto& p : n.parameters()) {
      seen.insert(p.get());
      ++total;
    }
  }
  CHECK(seen.size() == total);  // no tensor appears in two models
}

TEST_CASE("nuqe outputs are distributions and sentences are independent") {
  auto corpus = tiny_corpus(5, 3);
  const auto batch = testsup::single_batch(corpus);
  NuqeModel model(WordTask::Mt, {3, 6, 10, 5}, corpus.src_field.vocab->size(),
                  corpus.mt_field.vocab->size(), 11);
  Graph g;
  const auto out = model.forward_batch(g, batch, false);
  check_prob_rows(out.word_bad_probs);

  // Permuting the sentences within the batch permutes outputs identically.
  auto reversed_samples = corpus.samples;
  std::reverse(reversed_samples.begin(), reversed_samples.end());
  auto reversed = corpus;
  reversed.samples = reversed_samples;
  const auto rev_batch = testsup::single_batch(reversed);
  Graph g2;
  const auto rev_out = model.forward_batch(g2, rev_batch, false);
  REQUIRE(rev_out.word_bad_probs.size() == out.word_bad_probs.size());
  for (size_t b = 0; b < out.word_bad_probs.size(); ++b) {
    const auto& expect = out.word_bad_probs[b];
    const auto& got = rev_out.word_bad_probs[out.word_bad_probs.size() - 1 - b];
    REQUIRE(expect.size() == got.size());
    for (size_t i = 0; i < expect.size(); ++i)
      CHECK(expect[i] == doctest::Approx(got[i]).epsilon(1e-12));
  }
}

TEST_CASE("predictor emits target-vocabulary distributions per position") {
  auto corpus = testsup::copy_corpus(2, 21, 10, 5);
  PredictorOptions options{6, 8, 10};
  PredictorModel model(options, corpus.src_field.vocab->size(),
                       corpus.mt_field.vocab->size(), Direction::SrcToMt, 9);
  const auto& sample = corpus.samples[0];
  const auto enc_ids = corpus.src_field.numericalize(sample.src);
  const auto out_ids = corpus.mt_field.numericalize(sample.mt);
  Graph g;
  auto fwd = model.sentence_forward(g, enc_ids, out_ids);
  auto probs = g.softmax_rows(fwd.logits);
  REQUIRE(probs->rows() == out_ids.size());
  CHECK(probs->cols() == corpus.mt_field.vocab->size());
  for (size_t r = 0; r < probs->rows(); ++r) {
    double total = 0.0;
    for (size_t c = 0; c < probs->cols(); ++c) total += probs->at(r, c);
    CHECK(std::fabs(total - 1.0) <= 1e-9);
  }
  // Attention weights are distributions over the framed input positions.
  REQUIRE(fwd.attention->rows() == out_ids.size());
  CHECK(fwd.attention->cols() == enc_ids.size() + 2);
  for (size_t r = 0; r < fwd.attention->rows(); ++r) {
    double total = 0.0;
    for (size_t c = 0; c < fwd.attention->cols(); ++c) {
      CHECK(fwd.attention->at(r, c) >= 0.0);
      total += fwd.attention->at(r, c);
    }
    CHECK(std::fabs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("predictor never reads the token it predicts") {
  auto corpus = testsup::copy_corpus(1, 33, 12, 6);
  PredictorModel model({6, 8, 10}, corpus.src_field.vocab->size(),
                       corpus.mt_field.vocab->size(), Direction::SrcToMt, 13);
  const auto& sample = corpus.samples[0];
  const auto enc_ids = corpus.src_field.numericalize(sample.src);
  auto out_ids = corpus.mt_field.numericalize(sample.mt);
  REQUIRE(out_ids.size() >= 2);

  auto distributions = [&](const std::vector<int>& ids) {
    Graph g;
    auto fwd = model.sentence_forward(g, enc_ids, ids);
    auto probs = g.softmax_rows(fwd.logits);
    return probs->values();
  };
  const auto base = distributions(out_ids);
  const size_t vocab = corpus.mt_field.vocab->size();

  numerics::UniformSampler rng(55);
  for (int round = 0; round < 100; ++round) {
    const size_t i = rng.next_index(out_ids.size());
    auto perturbed = out_ids;
    perturbed[i] = static_cast<int>(rng.next_index(vocab));
    const auto changed = distributions(perturbed);
    // Row i must be bitwise identical to the unperturbed forward pass.
    CHECK(std::memcmp(&base[i * vocab], &changed[i * vocab],
                      vocab * sizeof(double)) == 0);
  }
}

TEST_CASE("estimator scores stay in the unit interval") {
  auto corpus = tiny_corpus(6, 3);
  auto predictor = std::make_shared<PredictorModel>(
      PredictorOptions{6, 8, 10}, corpus.src_field.vocab->size(),
      corpus.mt_field.vocab->size(), Direction::SrcToMt, 17);
  EstimatorOptions options;
  options.projection_dim = 6;
  options.lstm_dim = 5;
  EstimatorModel model(options, predictor, 19);
  const auto batch = testsup::single_batch(corpus);
  Graph g;
  const auto out = model.forward_batch(g, batch, true);
  REQUIRE(out.sentence_scores.size() == batch.size);
  for (double s : out.sentence_scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  check_prob_rows(out.word_bad_probs);
  REQUIRE(out.loss);
  CHECK(std::isfinite(out.loss->value()));
}

TEST_CASE("estimator rejects a direction mismatch") {
  auto corpus = tiny_corpus(7);
  auto reverse_predictor = std::make_shared<PredictorModel>(
      PredictorOptions{6, 8, 10}, corpus.mt_field.vocab->size(),
      corpus.src_field.vocab->size(), Direction::MtToSrc, 23);
  EstimatorOptions options;
  options.task = WordTask::Mt;
  CHECK_THROWS_WITH_AS(EstimatorModel(options, reverse_predictor, 1),
                       doctest::Contains("direction"), ConfigError);
  // And the matching direction constructs fine.
  options.task = WordTask::Source;
  CHECK_NOTHROW(EstimatorModel(options, reverse_predictor, 1));
}

TEST_CASE("multitask weight zero silences the sentence head gradients") {
  auto corpus = tiny_corpus(8, 2);
  auto predictor = std::make_shared<PredictorModel>(
      PredictorOptions{5, 6, 8}, corpus.src_field.vocab->size(),
      corpus.mt_field.vocab->size(), Direction::SrcToMt, 29);
  EstimatorOptions options;
  options.projection_dim = 5;
  options.lstm_dim = 4;
  options.multitask_weight = 0.0;
  options.fine_tune_predictor = true;
  EstimatorModel model(options, predictor, 31);
  const auto batch = testsup::single_batch(corpus);
  Graph g;
  const auto out = model.forward_batch(g, batch, true);
  REQUIRE(out.loss);
  g.backward(out.loss);
  for (const auto& p : model.parameters()) {
    if (p->name.rfind("estimator.sentence_head", 0) == 0) {
      REQUIRE(p->has_grad());
      for (double v : p->grad()) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("estimator source task covers source tokens") {
  auto corpus = tiny_corpus(9, 2);
  auto predictor = std::make_shared<PredictorModel>(
      PredictorOptions{5, 6, 8}, corpus.mt_field.vocab->size(),
      corpus.src_field.vocab->size(), Direction::MtToSrc, 37);
  EstimatorOptions options;
  options.projection_dim = 5;
  options.lstm_dim = 4;
  options.task = WordTask::Source;
  EstimatorModel model(options, predictor, 41);
  const auto batch = testsup::single_batch(corpus);
  Graph g;
  const auto out = model.forward_batch(g, batch, false);
  REQUIRE(out.word_bad_probs.size() == batch.size);
  for (size_t b = 0; b < batch.size; ++b)
    CHECK(out.word_bad_probs[b].size() == batch.src_len[b]);
  check_prob_rows(out.word_bad_probs);
}

TEST_CASE("full training losses pass gradient checking") {
  auto corpus = tiny_corpus(10, 2);
  const auto batch = testsup::single_batch(corpus);
  GradCheckOptions options;
  options.samples_per_param = 6;

  SUBCASE("quetch") {
    QuetchModel model(WordTask::Mt, {3, 5, 7},
                      corpus.src_field.vocab->size(),
                      corpus.mt_field.vocab->size(), 43);
    auto builder = [&](Graph& g) {
      return model.forward_batch(g, batch, true).loss;
    };
    CHECK(numerics::grad_check(builder, model.parameters(), options) < 1e-4);
  }
  SUBCASE("nuqe") {
    NuqeModel model(WordTask::Mt, {3, 5, 7, 4},
                    corpus.src_field.vocab->size(),
                    corpus.mt_field.vocab->size(), 47);
    auto builder = [&](Graph& g) {
      return model.forward_batch(g, batch, true).loss;
    };
    CHECK(numerics::grad_check(builder, model.parameters(), options) < 1e-4);
  }
  SUBCASE("nuqe on a 2-token sentence") {
    auto small = testsup::make_corpus(
        testsup::synthetic_samples(1, 3, 0.5, 8, 2));
    const auto small_batch = testsup::single_batch(small);
    NuqeModel model(WordTask::Mt, {3, 5, 7, 4},
                    small.src_field.vocab->size(),
                    small.mt_field.vocab->size(), 53);
    auto builder = [&](Graph& g) {
      return model.forward_batch(g, small_batch, true).loss;
    };
    CHECK(numerics::grad_check(builder, model.parameters(), options) < 1e-4);
  }
  SUBCASE("predictor") {
    PredictorModel model({4, 5, 6}, corpus.src_field.vocab->size(),
                         corpus.mt_field.vocab->size(), Direction::SrcToMt,
                         59);
    auto builder = [&](Graph& g) {
      return model.forward_batch(g, batch, true).loss;
    };
    CHECK(numerics::grad_check(builder, model.parameters(), options) < 1e-4);
  }
  SUBCASE("estimator with joint predictor training") {
    auto predictor = std::make_shared<PredictorModel>(
        PredictorOptions{4, 5, 6}, corpus.src_field.vocab->size(),
        corpus.mt_field.vocab->size(), Direction::SrcToMt, 61);
    EstimatorOptions eopts;
    eopts.projection_dim = 4;
    eopts.lstm_dim = 3;
    eopts.fine_tune_predictor = true;
    EstimatorModel model(eopts, predictor, 67);
    auto builder = [&](Graph& g) {
      return model.forward_batch(g, batch, true).loss;
    };
    CHECK(numerics::grad_check(builder, model.parameters(), options) < 1e-4);
  }
}

TEST_CASE("frozen predictor parameters receive no gradient") {
  auto corpus = tiny_corpus(11, 2);
  auto predictor = std::make_shared<PredictorModel>(
      PredictorOptions{4, 5, 6}, corpus.src_field.vocab->size(),
      corpus.mt_field.vocab->size(), Direction::SrcToMt, 71);
  EstimatorOptions options;
  options.projection_dim = 4;
  options.lstm_dim = 3;
  options.fine_tune_predictor = false;
  EstimatorModel model(options, predictor, 73);
  CHECK(model.parameters().size() <
        model.all_parameters().size());  // predictor excluded
  const auto batch = testsup::single_batch(corpus);
  Graph g;
  const auto out = model.forward_batch(g, batch, true);
  g.backward(out.loss);
  for (const auto& p : predictor->all_parameters())
    CHECK(!p->has_grad());
}

TEST_CASE("all outputs stay finite for finite inputs") {
  auto corpus = tiny_corpus(12, 4);
  const auto batch = testsup::single_batch(corpus);
  numerics::set_debug_checks(true);
  QuetchModel q(WordTask::Gaps, {5, 6, 8}, corpus.src_field.vocab->size(),
                corpus.mt_field.vocab->size(), 79);
  NuqeModel n(WordTask::Source, {3, 6, 8, 4}, corpus.src_field.vocab->size(),
              corpus.mt_field.vocab->size(), 83);
  Graph g1, g2;
  CHECK_NOTHROW(q.forward_batch(g1, batch, true));
  CHECK_NOTHROW(n.forward_batch(g2, batch, true));
  numerics::set_debug_checks(false);
}
