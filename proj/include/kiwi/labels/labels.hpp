#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kiwi/tag.hpp"

namespace kiwi::labels {

enum class EditOp { Match, Substitute, Delete, Insert };

struct Edit {
  EditOp op;
  int mt_index;  // -1 for Insert
  int pe_index;  // -1 for Delete
};

// Minimum-cost token alignment between an MT sentence and its post-edit:
// unit costs for substitute/insert/delete, zero for match. Within the
// script, mt and pe indices are each strictly increasing and jointly cover
// both sentences exactly once.
struct EditScript {
  std::vector<Edit> ops;

  int edit_count() const;
  int count(EditOp op) const;

  // Throws DataError if the script is inconsistent with the given lengths.
  void validate(size_t mt_len, size_t pe_len) const;

  // Replays the script over mt and returns the reconstructed post-edit.
  std::vector<std::string> apply(const std::vector<std::string>& mt,
                                 const std::vector<std::string>& pe) const;
};

struct TagSequence {
  TagVector mt_tags;   // one per MT token
  TagVector gap_tags;  // |MT| + 1 gap positions
  TagVector src_tags;  // one per source token
};

// Levenshtein alignment with deterministic backtrace tie-break:
// match > substitute > delete > insert. Token comparison is case-sensitive.
EditScript edit_alignment(const std::vector<std::string>& mt,
                          const std::vector<std::string>& pe);

// MT tag is BAD for substituted or deleted tokens; gap tag g is BAD when at
// least one insertion lands at gap g (the number of MT tokens consumed
// before the insertion).
std::pair<TagVector, TagVector> tags_from_edits(const EditScript& script,
                                                size_t mt_len);

// A source token is BAD when it aligns to at least one BAD MT token;
// unaligned tokens stay OK. Alignment pairs are (src index, mt index).
TagVector source_tags(size_t src_len,
                      const std::vector<std::pair<int, int>>& alignments,
                      const TagVector& mt_tags);

// Edit count divided by post-edit length, clamped to [0, 1]. Identical
// sentences give 0; an empty post-edit of a non-empty MT gives 1.
double hter(const std::vector<std::string>& mt,
            const std::vector<std::string>& pe);

struct LabeledTriplet {
  TagSequence tags;
  double hter = 0.0;
};

// Full label generation for one (mt, pe) pair with optional source info.
LabeledTriplet label_sentence(
    const std::vector<std::string>& mt, const std::vector<std::string>& pe,
    size_t src_len = 0,
    const std::vector<std::pair<int, int>>& alignments = {});

}  // namespace kiwi::labels
