#pragma once

#include <string>
#include <vector>

#include "kiwi/tag.hpp"

namespace kiwi::cli {

enum class RenderFormat { Ansi, Html };

// One rendered line per sentence: BAD words in red, BAD gaps shown as a red
// underscore between their neighboring words. HTML output escapes markup.
// mt_probs rows must have one value per token and gap_probs rows one value
// per gap (token count + 1).
std::string render(const std::vector<std::vector<std::string>>& sentences,
                   const std::vector<std::vector<double>>& mt_probs,
                   const std::vector<std::vector<double>>& gap_probs,
                   double threshold, RenderFormat format);

std::string html_escape(const std::string& text);

}  // namespace kiwi::cli
