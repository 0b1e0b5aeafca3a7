#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "kiwi/labels/labels.hpp"
#include "kiwi/numerics/tensor.hpp"

using namespace kiwi;
using namespace kiwi::labels;

namespace {

using Sentence = std::vector<std::string>;

// Independent minimum-edit oracle: plain recursion, no memoization, no
// shared code with the DP implementation.
int oracle_edits(const Sentence& a, const Sentence& b, size_t i, size_t j) {
  if (i == a.size()) return static_cast<int>(b.size() - j);
  if (j == b.size()) return static_cast<int>(a.size() - i);
  int best = oracle_edits(a, b, i + 1, j) + 1;
  best = std::min(best, oracle_edits(a, b, i, j + 1) + 1);
  best = std::min(best,
                  oracle_edits(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1));
  return best;
}

int oracle_edits(const Sentence& a, const Sentence& b) {
  return oracle_edits(a, b, 0, 0);
}

Sentence random_sentence(numerics::UniformSampler& rng, size_t max_len,
                         const std::vector<std::string>& alphabet) {
  Sentence s;
  const size_t len = rng.next_index(max_len + 1);
  for (size_t i = 0; i < len; ++i)
    s.push_back(alphabet[rng.next_index(alphabet.size())]);
  return s;
}

}  // namespace

TEST_CASE("identical sentences align with matches only") {
  const Sentence mt{"a", "b"};
  const auto script = edit_alignment(mt, mt);
  REQUIRE(script.ops.size() == 2);
  CHECK(script.ops[0].op == EditOp::Match);
  CHECK(script.ops[1].op == EditOp::Match);
  CHECK(script.edit_count() == 0);
}

TEST_CASE("single substitution in the middle") {
  const Sentence mt{"a", "b", "c"};
  const Sentence pe{"a", "x", "c"};
  const auto script = edit_alignment(mt, pe);
  CHECK(script.edit_count() == 1);
  CHECK(script.edit_count() == oracle_edits(mt, pe));
  CHECK(script.count(EditOp::Substitute) == 1);
  bool found = false;
  for (const auto& e : script.ops)
    if (e.op == EditOp::Substitute) {
      CHECK(e.mt_index == 1);
      CHECK(e.pe_index == 1);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("insertion into an empty sentence") {
  const auto script = edit_alignment({}, {"a"});
  REQUIRE(script.ops.size() == 1);
  CHECK(script.ops[0].op == EditOp::Insert);
  CHECK(script.edit_count() == 1);
}

TEST_CASE("identity script tags everything OK") {
  const Sentence mt{"x", "y", "z"};
  const auto [mt_tags, gap_tags] = tags_from_edits(edit_alignment(mt, mt), 3);
  for (Tag t : mt_tags) CHECK(t == Tag::OK);
  for (Tag t : gap_tags) CHECK(t == Tag::OK);
  CHECK(mt_tags.size() == 3);
  CHECK(gap_tags.size() == 4);
}

TEST_CASE("insertion marks the enclosing gap") {
  const Sentence mt{"a", "b"};
  const Sentence pe{"a", "c", "b"};
  const auto [mt_tags, gap_tags] = tags_from_edits(edit_alignment(mt, pe), 2);
  CHECK(mt_tags == TagVector{Tag::OK, Tag::OK});
  CHECK(gap_tags == TagVector{Tag::OK, Tag::BAD, Tag::OK});
}

TEST_CASE("deletion marks the deleted MT token") {
  const Sentence mt{"a", "b"};
  const Sentence pe{"a"};
  const auto [mt_tags, gap_tags] = tags_from_edits(edit_alignment(mt, pe), 2);
  CHECK(mt_tags == TagVector{Tag::OK, Tag::BAD});
  CHECK(gap_tags == TagVector{Tag::OK, Tag::OK, Tag::OK});
}

TEST_CASE("tags_from_edits rejects an inconsistent script") {
  EditScript script;
  script.ops = {{EditOp::Match, 1, 0}};  // starts in the middle
  CHECK_THROWS_AS(tags_from_edits(script, 2), DataError);
}

TEST_CASE("source tags follow alignments to BAD MT tokens") {
  SUBCASE("no alignments leaves everything OK") {
    const auto tags = source_tags(3, {}, {Tag::BAD, Tag::BAD});
    CHECK(tags == TagVector{Tag::OK, Tag::OK, Tag::OK});
  }
  SUBCASE("aligned BAD propagates") {
    const auto tags = source_tags(2, {{0, 0}, {1, 1}}, {Tag::OK, Tag::BAD});
    CHECK(tags == TagVector{Tag::OK, Tag::BAD});
  }
  SUBCASE("one BAD among multiple alignments is enough") {
    const auto tags = source_tags(1, {{0, 0}, {0, 1}}, {Tag::OK, Tag::BAD});
    CHECK(tags == TagVector{Tag::BAD});
  }
  SUBCASE("out-of-range alignment is an error") {
    CHECK_THROWS_AS(source_tags(1, {{1, 0}}, {Tag::OK}), DataError);
    CHECK_THROWS_AS(source_tags(1, {{0, 2}}, {Tag::OK}), DataError);
  }
}

TEST_CASE("hter of a pair with 4 insertions, 1 deletion, 3 substitutions") {
  // Post-edit of 12 distinct words; MT drops 4, changes 3, adds 1.
  const Sentence pe{"w1", "w2", "w3", "w4",  "w5",  "w6",
                    "w7", "w8", "w9", "w10", "w11", "w12"};
  const Sentence mt{"w1", "s3", "w4", "s6", "w7", "s9", "w10", "w12", "xx"};
  const auto script = edit_alignment(mt, pe);
  CHECK(script.count(EditOp::Insert) == 4);
  CHECK(script.count(EditOp::Delete) == 1);
  CHECK(script.count(EditOp::Substitute) == 3);
  CHECK(script.edit_count() == 8);
  CHECK(script.edit_count() == oracle_edits(mt, pe));
  CHECK(hter(mt, pe) == doctest::Approx(8.0 / 12.0).epsilon(1e-9));
}

TEST_CASE("hter edge cases") {
  CHECK(hter({"a", "b"}, {"a", "b"}) == 0.0);
  CHECK(hter({}, {}) == 0.0);
  CHECK(hter({"a"}, {}) == 1.0);  // empty post-edit of a non-empty MT
  CHECK(hter({"a", "b"}, {"a", "c", "b"}) == doctest::Approx(1.0 / 3.0));
  // More edits than post-edit tokens: clamped to 1.
  CHECK(hter({"a", "b", "c"}, {"x"}) == 1.0);
}

TEST_CASE("labels match the recursive oracle on random sentences") {
  const std::vector<std::string> alphabet{"a", "b", "c"};
  numerics::UniformSampler rng(7);
  for (int round = 0; round < 500; ++round) {
    const auto mt = random_sentence(rng, 6, alphabet);
    const auto pe = random_sentence(rng, 6, alphabet);
    const auto script = edit_alignment(mt, pe);
    CHECK(script.edit_count() == oracle_edits(mt, pe));
    // Replaying the script over MT reconstructs the post-edit exactly.
    CHECK(script.apply(mt, pe) == pe);
    const auto [mt_tags, gap_tags] = tags_from_edits(script, mt.size());
    CHECK(mt_tags.size() == mt.size());
    CHECK(gap_tags.size() == mt.size() + 1);

    const double score = hter(mt, pe);
    CHECK((score == 0.0) == (mt == pe));
    if (score > 0.0) {
      // At least one BAD tag must exist whenever edits were needed.
      size_t bad = 0;
      for (Tag t : mt_tags) bad += t == Tag::BAD;
      for (Tag t : gap_tags) bad += t == Tag::BAD;
      CHECK(bad >= 1);
    }
  }
}

TEST_CASE("token comparison is case-sensitive") {
  CHECK(edit_alignment({"Word"}, {"word"}).edit_count() == 1);
  CHECK(edit_alignment({"Word"}, {"Word"}).edit_count() == 0);
}

TEST_CASE("backtrace tie-break prefers match then substitute then delete") {
  // mt=ab, pe=ba has several minimal scripts; the tie-break must pick the
  // same one every time.
  const auto s1 = edit_alignment({"a", "b"}, {"b", "a"});
  const auto s2 = edit_alignment({"a", "b"}, {"b", "a"});
  REQUIRE(s1.ops.size() == s2.ops.size());
  for (size_t i = 0; i < s1.ops.size(); ++i) {
    CHECK(s1.ops[i].op == s2.ops[i].op);
    CHECK(s1.ops[i].mt_index == s2.ops[i].mt_index);
    CHECK(s1.ops[i].pe_index == s2.ops[i].pe_index);
  }
  CHECK(s1.edit_count() == 2);
}

TEST_CASE("label_sentence bundles tags and score") {
  const auto labeled = label_sentence({"a", "b"}, {"a", "c", "b"}, 2,
                                      {{0, 0}, {1, 1}});
  CHECK(labeled.tags.mt_tags == TagVector{Tag::OK, Tag::OK});
  CHECK(labeled.tags.gap_tags == TagVector{Tag::OK, Tag::BAD, Tag::OK});
  CHECK(labeled.tags.src_tags == TagVector{Tag::OK, Tag::OK});
  CHECK(labeled.hter == doctest::Approx(1.0 / 3.0));
}
