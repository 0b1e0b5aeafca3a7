#pragma once

#include <string>
#include <vector>

#include "kiwi/common.hpp"

namespace kiwi {

enum class Tag : int { OK = 0, BAD = 1 };

inline const char* tag_name(Tag t) { return t == Tag::OK ? "OK" : "BAD"; }

inline Tag parse_tag(const std::string& s) {
  if (s == "OK") return Tag::OK;
  if (s == "BAD") return Tag::BAD;
  throw DataError("invalid tag '" + s + "' (expected OK or BAD)");
}

using TagVector = std::vector<Tag>;

}  // namespace kiwi
