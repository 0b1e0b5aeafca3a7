#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "kiwi/data/batch.hpp"
#include "kiwi/data/corpus.hpp"
#include "kiwi/data/vocab.hpp"

using namespace kiwi;
using namespace kiwi::data;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "kiwi_data_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_lines(const std::string& name,
                        const std::vector<std::string>& lines) {
  const auto path = temp_dir() / name;
  std::ofstream f(path, std::ios::trunc);
  for (const auto& line : lines) f << line << '\n';
  return path.string();
}

}  // namespace

TEST_CASE("special symbols sit at fixed indices") {
  Vocabulary vocab;
  CHECK(vocab.id(kPadToken) == kPadId);
  CHECK(vocab.id(kUnkToken) == kUnkId);
  CHECK(vocab.id(kStartToken) == kStartId);
  CHECK(vocab.id(kStopToken) == kStopId);
  CHECK(vocab.id(kUnalignedToken) == kUnalignedId);
  CHECK(vocab.size() == kNumSpecials);
  CHECK(vocab.id("anything") == kUnkId);
}

TEST_CASE("build_vocab applies the frequency threshold") {
  const auto vocab = build_vocab({{"a", "a", "b"}}, 2);
  CHECK(vocab.contains("a"));
  CHECK(!vocab.contains("b"));
}

TEST_CASE("build_vocab is deterministic with lexicographic tie-break") {
  const std::vector<std::vector<std::string>> corpus{
      {"y", "x", "z", "z", "z"}, {"x", "y"}};
  const auto v1 = build_vocab(corpus, 1);
  const auto v2 = build_vocab(corpus, 1);
  CHECK(v1.tokens() == v2.tokens());
  // z has frequency 3; x and y tie at 2 and sort lexicographically.
  CHECK(v1.id("z") == kNumSpecials);
  CHECK(v1.id("x") == kNumSpecials + 1);
  CHECK(v1.id("y") == kNumSpecials + 2);
}

TEST_CASE("vocabulary round trips through its file format") {
  const auto vocab = build_vocab({{"tok1", "tok2", "tok1"}}, 1);
  const auto path = (temp_dir() / "vocab.txt").string();
  vocab.save(path);
  const auto loaded = Vocabulary::load(path);
  CHECK(loaded.tokens() == vocab.tokens());
  CHECK(loaded.content_hash() == vocab.content_hash());
}

TEST_CASE("parse_alignments") {
  CHECK(parse_alignments("0-0 1-2", 2, 3) ==
        std::vector<std::pair<int, int>>{{0, 0}, {1, 2}});
  CHECK(parse_alignments("", 5, 5).empty());
  // Duplicates are preserved.
  CHECK(parse_alignments("0-0 0-0", 1, 1).size() == 2);
  CHECK_THROWS_AS(parse_alignments("2-0", 2, 1), DataError);
  CHECK_THROWS_AS(parse_alignments("0-5", 2, 3), DataError);
  CHECK_THROWS_AS(parse_alignments("0_0", 1, 1), DataError);
  CHECK_THROWS_AS(parse_alignments("a-0", 1, 1), DataError);
  CHECK_THROWS_AS(parse_alignments("-1-0", 1, 1), DataError);
}

TEST_CASE("load_qe_corpus basic parallel loading") {
  CorpusPaths paths;
  paths.src = write_lines("c.src", {"a b", "c", "d e f"});
  paths.mt = write_lines("c.mt", {"A B", "C", "D E F"});
  const auto samples = load_qe_corpus(paths);
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].src == std::vector<std::string>{"a", "b"});
  CHECK(samples[2].mt == std::vector<std::string>{"D", "E", "F"});
}

TEST_CASE("load_qe_corpus rejects mismatched line counts") {
  CorpusPaths paths;
  paths.src = write_lines("m.src", {"a", "b"});
  paths.mt = write_lines("m.mt", {"A"});
  CHECK_THROWS_AS(load_qe_corpus(paths), DataError);
}

TEST_CASE("tag length violations are reported with line numbers") {
  CorpusPaths paths;
  paths.src = write_lines("t.src", {"s1 s2", "s3"});
  paths.mt = write_lines("t.mt", {"a b", "c"});
  SUBCASE("mt tags must match token count") {
    paths.mt_tags = write_lines("t.tags", {"OK OK", "OK OK BAD"});
    CHECK_THROWS_WITH_AS(load_qe_corpus(paths), doctest::Contains("line 2"),
                         DataError);
  }
  SUBCASE("gap tags carry one extra position") {
    paths.gap_tags = write_lines("t.gaps", {"OK OK BAD", "OK OK"});
    const auto samples = load_qe_corpus(paths);
    CHECK(samples[0].gap_tags->size() == 3);
    CHECK((*samples[0].gap_tags)[2] == Tag::BAD);
  }
  SUBCASE("unknown tag text is rejected") {
    paths.mt_tags = write_lines("t.bad", {"OK ok", "OK"});
    CHECK_THROWS_AS(load_qe_corpus(paths), DataError);
  }
}

TEST_CASE("hter files are validated") {
  CorpusPaths paths;
  paths.src = write_lines("h.src", {"a", "b"});
  paths.mt = write_lines("h.mt", {"A", "B"});
  SUBCASE("valid scores load") {
    paths.hter = write_lines("h.hter", {"0.25", "1.0"});
    const auto samples = load_qe_corpus(paths);
    CHECK(*samples[0].hter == doctest::Approx(0.25));
  }
  SUBCASE("out-of-range scores are rejected") {
    paths.hter = write_lines("h.bad", {"0.25", "1.5"});
    CHECK_THROWS_WITH_AS(load_qe_corpus(paths), doctest::Contains("line 2"),
                         DataError);
  }
}

TEST_CASE("over-long sentences are rejected, not truncated") {
  std::string long_line;
  for (int i = 0; i < 201; ++i) long_line += "w ";
  CorpusPaths paths;
  paths.src = write_lines("l.src", {long_line});
  paths.mt = write_lines("l.mt", {"A"});
  CHECK_THROWS_WITH_AS(load_qe_corpus(paths), doctest::Contains("201"),
                       DataError);
  LoadOptions relaxed;
  relaxed.max_length = 300;
  CHECK_NOTHROW(load_qe_corpus(paths, relaxed));
}

TEST_CASE("numericalize round trips in-vocabulary tokens") {
  auto vocab = std::make_shared<Vocabulary>(
      build_vocab({{"red", "green", "blue", "red"}}, 1));
  Field field{vocab, 1};
  const std::vector<std::string> tokens{"red", "blue", "green"};
  CHECK(field.denumericalize(field.numericalize(tokens)) == tokens);
  // Out-of-vocabulary tokens map to the unknown symbol.
  CHECK(field.numericalize({"violet"}) == std::vector<int>{kUnkId});
}

namespace {

std::vector<QESample> toy_samples(size_t n) {
  std::vector<QESample> samples;
  for (size_t i = 0; i < n; ++i) {
    QESample s;
    s.src = {"s" + std::to_string(i % 4), "common"};
    s.mt = {"t" + std::to_string(i % 5), "shared", "tail"};
    s.alignments = {{0, 0}};
    s.mt_tags = TagVector{Tag::OK, Tag::BAD, Tag::OK};
    samples.push_back(std::move(s));
  }
  return samples;
}

std::pair<Field, Field> toy_fields(const std::vector<QESample>& samples) {
  std::vector<std::vector<std::string>> src_sents, mt_sents;
  for (const auto& s : samples) {
    src_sents.push_back(s.src);
    mt_sents.push_back(s.mt);
  }
  auto src_vocab = std::make_shared<Vocabulary>(build_vocab(src_sents, 1));
  auto mt_vocab = std::make_shared<Vocabulary>(build_vocab(mt_sents, 1));
  return {Field{src_vocab, 1}, Field{mt_vocab, 1}};
}

}  // namespace

TEST_CASE("make_batches splits 10 samples into 4+4+2") {
  const auto samples = toy_samples(10);
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.batch_size = 4;
  const auto batches = make_batches(samples, src_field, mt_field, options);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size == 4);
  CHECK(batches[1].size == 4);
  CHECK(batches[2].size == 2);
}

TEST_CASE("shuffling is a pure function of seed and epoch") {
  const auto samples = toy_samples(32);
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.batch_size = 8;
  options.seed = 17;
  options.epoch = 3;
  const auto a = make_batches(samples, src_field, mt_field, options);
  const auto b = make_batches(samples, src_field, mt_field, options);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].sample_index == b[i].sample_index);
  options.epoch = 4;
  const auto c = make_batches(samples, src_field, mt_field, options);
  bool any_different = false;
  for (size_t i = 0; i < a.size() && !any_different; ++i)
    any_different = a[i].sample_index != c[i].sample_index;
  CHECK(any_different);
}

TEST_CASE("every sample appears exactly once per epoch") {
  const auto samples = toy_samples(23);
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.batch_size = 5;
  options.seed = 3;
  std::map<size_t, int> seen;
  for (const auto& batch :
       make_batches(samples, src_field, mt_field, options))
    for (size_t idx : batch.sample_index) ++seen[idx];
  CHECK(seen.size() == samples.size());
  for (const auto& [idx, count] : seen) CHECK(count == 1);
}

TEST_CASE("masks mark exactly the non-pad positions") {
  auto samples = toy_samples(3);
  samples[1].mt = {"one"};
  samples[1].mt_tags = TagVector{Tag::OK};
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.batch_size = 3;
  options.shuffle = false;
  const auto batches = make_batches(samples, src_field, mt_field, options);
  REQUIRE(batches.size() == 1);
  const auto& batch = batches[0];
  for (size_t r = 0; r < batch.size; ++r) {
    size_t mask_sum = 0;
    for (size_t c = 0; c < batch.mt_mask.cols; ++c) {
      const bool in_range = c < batch.mt_len[r];
      CHECK(batch.mt_mask.at(r, c) == (in_range ? 1 : 0));
      mask_sum += static_cast<size_t>(batch.mt_mask.at(r, c));
      if (!in_range) CHECK(batch.mt_ids.at(r, c) == kPadId);
    }
    CHECK(mask_sum == batch.mt_len[r]);
  }
}

TEST_CASE("unaligned MT positions resolve to the unaligned symbol") {
  QESample s;
  s.src = {"s0", "s1"};
  s.mt = {"t0", "t1", "t2"};
  s.alignments = {{0, 0}, {1, 0}};  // both source tokens align to MT 0
  const std::vector<QESample> samples{s};
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.shuffle = false;
  const auto batch = make_batches(samples, src_field, mt_field, options)[0];
  // Leftmost aligned source index wins for MT position 0.
  CHECK(batch.aligned_src_pos.at(0, 0) == 0);
  CHECK(batch.aligned_src_ids.at(0, 0) == src_field.vocab->id("s0"));
  // Positions 1 and 2 have no alignment.
  CHECK(batch.aligned_src_pos.at(0, 1) == -1);
  CHECK(batch.aligned_src_ids.at(0, 1) == kUnalignedId);
  CHECK(batch.aligned_src_ids.at(0, 2) == kUnalignedId);
  // Reverse direction: source 1 aligns leftmost to MT 0.
  CHECK(batch.aligned_mt_pos.at(0, 1) == 0);
}

TEST_CASE("un-padding recovers the multiset of input samples") {
  const auto samples = toy_samples(17);
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.batch_size = 4;
  options.seed = 9;
  std::multiset<std::vector<std::string>> expected, recovered;
  for (const auto& s : samples) expected.insert(s.mt);
  for (const auto& batch :
       make_batches(samples, src_field, mt_field, options))
    for (size_t r = 0; r < batch.size; ++r)
      recovered.insert(mt_field.denumericalize(batch.mt_row(r)));
  CHECK(expected == recovered);
}

TEST_CASE("batch_size below one is rejected") {
  const auto samples = toy_samples(2);
  const auto [src_field, mt_field] = toy_fields(samples);
  BatchOptions options;
  options.batch_size = 0;
  CHECK_THROWS_AS(make_batches(samples, src_field, mt_field, options),
                  DataError);
}
