#include "kiwi/labels/labels.hpp"

#include <algorithm>

namespace kiwi::labels {

int EditScript::edit_count() const {
  int n = 0;
  for (const auto& e : ops)
    if (e.op != EditOp::Match) ++n;
  return n;
}

int EditScript::count(EditOp op) const {
  int n = 0;
  for (const auto& e : ops)
    if (e.op == op) ++n;
  return n;
}

void EditScript::validate(size_t mt_len, size_t pe_len) const {
  int next_mt = 0, next_pe = 0;
  for (const auto& e : ops) {
    switch (e.op) {
      case EditOp::Match:
      case EditOp::Substitute:
        if (e.mt_index != next_mt || e.pe_index != next_pe)
          throw DataError("edit script: indices out of order");
        ++next_mt;
        ++next_pe;
        break;
      case EditOp::Delete:
        if (e.mt_index != next_mt)
          throw DataError("edit script: delete index out of order");
        ++next_mt;
        break;
      case EditOp::Insert:
        if (e.pe_index != next_pe)
          throw DataError("edit script: insert index out of order");
        ++next_pe;
        break;
    }
  }
  if (next_mt != static_cast<int>(mt_len) ||
      next_pe != static_cast<int>(pe_len))
    throw DataError("edit script does not cover both sentences");
}

std::vector<std::string> EditScript::apply(
    const std::vector<std::string>& mt,
    const std::vector<std::string>& pe) const {
  validate(mt.size(), pe.size());
  std::vector<std::string> out;
  for (const auto& e : ops) {
    switch (e.op) {
      case EditOp::Match:
        out.push_back(mt[static_cast<size_t>(e.mt_index)]);
        break;
      case EditOp::Substitute:
      case EditOp::Insert:
        out.push_back(pe[static_cast<size_t>(e.pe_index)]);
        break;
      case EditOp::Delete:
        break;
    }
  }
  return out;
}

EditScript edit_alignment(const std::vector<std::string>& mt,
                          const std::vector<std::string>& pe) {
  const size_t n = mt.size(), m = pe.size();
  // d[i][j]: min edits to turn mt[0..i) into pe[0..j).
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int sub_cost = mt[i - 1] == pe[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j - 1] + sub_cost, d[i - 1][j] + 1,
                          d[i][j - 1] + 1});
    }
  }

  // Backtrace, preferring match > substitute > delete > insert.
  std::vector<Edit> reversed;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && mt[i - 1] == pe[j - 1] &&
        d[i - 1][j - 1] == d[i][j]) {
      reversed.push_back({EditOp::Match, static_cast<int>(i - 1),
                          static_cast<int>(j - 1)});
      --i;
      --j;
    } else if (i > 0 && j > 0 && mt[i - 1] != pe[j - 1] &&
               d[i - 1][j - 1] + 1 == d[i][j]) {
      reversed.push_back({EditOp::Substitute, static_cast<int>(i - 1),
                          static_cast<int>(j - 1)});
      --i;
      --j;
    } else if (i > 0 && d[i - 1][j] + 1 == d[i][j]) {
      reversed.push_back({EditOp::Delete, static_cast<int>(i - 1), -1});
      --i;
    } else {
      reversed.push_back({EditOp::Insert, -1, static_cast<int>(j - 1)});
      --j;
    }
  }
  EditScript script;
  script.ops.assign(reversed.rbegin(), reversed.rend());
  return script;
}

std::pair<TagVector, TagVector> tags_from_edits(const EditScript& script,
                                                size_t mt_len) {
  size_t pe_len = 0;
  for (const auto& e : script.ops)
    if (e.op != EditOp::Delete) ++pe_len;
  script.validate(mt_len, pe_len);

  TagVector mt_tags(mt_len, Tag::OK);
  TagVector gap_tags(mt_len + 1, Tag::OK);
  size_t consumed = 0;  // MT tokens consumed so far = current gap position
  for (const auto& e : script.ops) {
    switch (e.op) {
      case EditOp::Match:
        ++consumed;
        break;
      case EditOp::Substitute:
      case EditOp::Delete:
        mt_tags[static_cast<size_t>(e.mt_index)] = Tag::BAD;
        ++consumed;
        break;
      case EditOp::Insert:
        gap_tags[consumed] = Tag::BAD;
        break;
    }
  }
  return {std::move(mt_tags), std::move(gap_tags)};
}

TagVector source_tags(size_t src_len,
                      const std::vector<std::pair<int, int>>& alignments,
                      const TagVector& mt_tags) {
  TagVector tags(src_len, Tag::OK);
  for (const auto& [src_idx, mt_idx] : alignments) {
    if (src_idx < 0 || static_cast<size_t>(src_idx) >= src_len)
      throw DataError(strformat("alignment source index %d out of range [0, %zu)",
                                src_idx, src_len));
    if (mt_idx < 0 || static_cast<size_t>(mt_idx) >= mt_tags.size())
      throw DataError(strformat("alignment target index %d out of range [0, %zu)",
                                mt_idx, mt_tags.size()));
    if (mt_tags[static_cast<size_t>(mt_idx)] == Tag::BAD)
      tags[static_cast<size_t>(src_idx)] = Tag::BAD;
  }
  return tags;
}

double hter(const std::vector<std::string>& mt,
            const std::vector<std::string>& pe) {
  if (mt == pe) return 0.0;
  if (pe.empty()) return mt.empty() ? 0.0 : 1.0;
  const double edits = edit_alignment(mt, pe).edit_count();
  return std::min(1.0, edits / static_cast<double>(pe.size()));
}

LabeledTriplet label_sentence(
    const std::vector<std::string>& mt, const std::vector<std::string>& pe,
    size_t src_len, const std::vector<std::pair<int, int>>& alignments) {
  LabeledTriplet out;
  EditScript script = edit_alignment(mt, pe);
  auto [mt_tags, gap_tags] = tags_from_edits(script, mt.size());
  out.tags.mt_tags = std::move(mt_tags);
  out.tags.gap_tags = std::move(gap_tags);
  out.tags.src_tags = source_tags(src_len, alignments, out.tags.mt_tags);
  if (pe.empty()) {
    out.hter = mt.empty() ? 0.0 : 1.0;
  } else {
    out.hter = std::min(
        1.0, script.edit_count() / static_cast<double>(pe.size()));
  }
  return out;
}

}  // namespace kiwi::labels
