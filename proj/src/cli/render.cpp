#include "kiwi/cli/render.hpp"

#include <sstream>

namespace kiwi::cli {

namespace {

constexpr const char* kAnsiRed = "\x1b[31m";
constexpr const char* kAnsiReset = "\x1b[0m";

std::string ansi_word(const std::string& word, bool bad) {
  return bad ? kAnsiRed + word + kAnsiReset : word;
}

std::string html_word(const std::string& word, bool bad) {
  const std::string escaped = html_escape(word);
  return bad ? "<span class=\"bad\">" + escaped + "</span>" : escaped;
}

}  // namespace

std::string html_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render(const std::vector<std::vector<std::string>>& sentences,
                   const std::vector<std::vector<double>>& mt_probs,
                   const std::vector<std::vector<double>>& gap_probs,
                   double threshold, RenderFormat format) {
  if (mt_probs.size() != sentences.size() ||
      gap_probs.size() != sentences.size())
    throw DataError(strformat(
        "render: %zu sentences but %zu MT and %zu gap prediction rows",
        sentences.size(), mt_probs.size(), gap_probs.size()));

  const bool html = format == RenderFormat::Html;
  std::ostringstream out;
  if (html)
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
           "<style>.bad { color: #cc0000; }</style>\n</head>\n<body>\n";

  for (size_t s = 0; s < sentences.size(); ++s) {
    const auto& tokens = sentences[s];
    if (mt_probs[s].size() != tokens.size())
      throw DataError(strformat(
          "render: sentence %zu has %zu tokens but %zu MT predictions", s + 1,
          tokens.size(), mt_probs[s].size()));
    if (gap_probs[s].size() != tokens.size() + 1)
      throw DataError(strformat(
          "render: sentence %zu has %zu gaps but %zu gap predictions", s + 1,
          tokens.size() + 1, gap_probs[s].size()));

    std::vector<std::string> pieces;
    for (size_t i = 0; i <= tokens.size(); ++i) {
      if (gap_probs[s][i] >= threshold)
        pieces.push_back(html ? html_word("_", true) : ansi_word("_", true));
      if (i < tokens.size()) {
        const bool bad = mt_probs[s][i] >= threshold;
        pieces.push_back(html ? html_word(tokens[i], bad)
                              : ansi_word(tokens[i], bad));
      }
    }
    std::string line;
    for (size_t i = 0; i < pieces.size(); ++i) {
      if (i) line += ' ';
      line += pieces[i];
    }
    if (html)
      out << "<p>" << line << "</p>\n";
    else
      out << line << "\n";
  }
  if (html) out << "</body>\n</html>\n";
  return out.str();
}

}  // namespace kiwi::cli
