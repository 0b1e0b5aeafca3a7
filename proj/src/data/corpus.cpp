#include "kiwi/data/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kiwi::data {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string tok;
  while (stream >> tok) tokens.push_back(tok);
  return tokens;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void check_line_count(const std::string& path, size_t got, size_t expected,
                      const std::string& reference) {
  if (got != expected)
    throw DataError(strformat(
        "%s has %zu lines but %s has %zu lines (parallel files must match)",
        path.c_str(), got, reference.c_str(), expected));
}

TagVector parse_tag_line(const std::string& line, size_t expected,
                         const std::string& path, size_t line_no) {
  const auto raw = tokenize(line);
  if (raw.size() != expected)
    throw DataError(strformat("%s line %zu: expected %zu tags but found %zu",
                              path.c_str(), line_no, expected, raw.size()));
  TagVector tags;
  tags.reserve(raw.size());
  for (const auto& t : raw) {
    try {
      tags.push_back(parse_tag(t));
    } catch (const DataError& e) {
      throw DataError(strformat("%s line %zu: %s", path.c_str(), line_no,
                                e.what()));
    }
  }
  return tags;
}

double parse_hter_line(const std::string& line, const std::string& path,
                       size_t line_no) {
  double v = 0.0;
  try {
    size_t pos = 0;
    v = std::stod(line, &pos);
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos != line.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw DataError(strformat("%s line %zu: invalid score '%s'", path.c_str(),
                              line_no, line.c_str()));
  }
  if (v < 0.0 || v > 1.0)
    throw DataError(strformat("%s line %zu: score %g outside [0, 1]",
                              path.c_str(), line_no, v));
  return v;
}

void check_length_cap(const std::vector<std::string>& tokens,
                      const std::string& path, size_t line_no,
                      size_t max_length) {
  if (tokens.size() > max_length)
    throw DataError(strformat(
        "%s line %zu: sentence has %zu tokens, over the %zu-token limit "
        "(long sentences are rejected, not truncated)",
        path.c_str(), line_no, tokens.size(), max_length));
}

}  // namespace

std::vector<std::vector<std::string>> read_token_file(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<std::string>> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(tokenize(line));
  return out;
}

std::vector<std::pair<int, int>> parse_alignments(const std::string& line,
                                                  size_t src_len,
                                                  size_t mt_len) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& tok : tokenize(line)) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == tok.size())
      throw DataError("malformed alignment token '" + tok +
                      "' (expected i-j)");
    int src_idx = -1, mt_idx = -1;
    const char* begin = tok.data();
    auto r1 = std::from_chars(begin, begin + dash, src_idx);
    auto r2 = std::from_chars(begin + dash + 1, begin + tok.size(), mt_idx);
    if (r1.ec != std::errc() || r1.ptr != begin + dash ||
        r2.ec != std::errc() || r2.ptr != begin + tok.size())
      throw DataError("malformed alignment token '" + tok +
                      "' (expected i-j)");
    if (src_idx < 0 || static_cast<size_t>(src_idx) >= src_len)
      throw DataError(strformat(
          "alignment '%s': source index out of range for %zu-token sentence",
          tok.c_str(), src_len));
    if (mt_idx < 0 || static_cast<size_t>(mt_idx) >= mt_len)
      throw DataError(strformat(
          "alignment '%s': target index out of range for %zu-token sentence",
          tok.c_str(), mt_len));
    pairs.emplace_back(src_idx, mt_idx);
  }
  return pairs;
}

std::vector<QESample> load_qe_corpus(const CorpusPaths& paths,
                                     const LoadOptions& options) {
  if (paths.src.empty() || paths.mt.empty())
    throw DataError("corpus needs both a source and a target file");
  const auto src_lines = read_lines(paths.src);
  const auto mt_lines = read_lines(paths.mt);
  check_line_count(paths.mt, mt_lines.size(), src_lines.size(), paths.src);

  std::vector<std::string> align_lines, mt_tag_lines, gap_tag_lines,
      src_tag_lines, hter_lines;
  if (!paths.alignments.empty()) {
    align_lines = read_lines(paths.alignments);
    check_line_count(paths.alignments, align_lines.size(), src_lines.size(),
                     paths.src);
  }
  if (!paths.mt_tags.empty()) {
    mt_tag_lines = read_lines(paths.mt_tags);
    check_line_count(paths.mt_tags, mt_tag_lines.size(), src_lines.size(),
                     paths.src);
  }
  if (!paths.gap_tags.empty()) {
    gap_tag_lines = read_lines(paths.gap_tags);
    check_line_count(paths.gap_tags, gap_tag_lines.size(), src_lines.size(),
                     paths.src);
  }
  if (!paths.src_tags.empty()) {
    src_tag_lines = read_lines(paths.src_tags);
    check_line_count(paths.src_tags, src_tag_lines.size(), src_lines.size(),
                     paths.src);
  }
  if (!paths.hter.empty()) {
    hter_lines = read_lines(paths.hter);
    check_line_count(paths.hter, hter_lines.size(), src_lines.size(),
                     paths.src);
  }

  std::vector<QESample> samples;
  samples.reserve(src_lines.size());
  for (size_t i = 0; i < src_lines.size(); ++i) {
    const size_t line_no = i + 1;
    QESample sample;
    sample.src = tokenize(src_lines[i]);
    sample.mt = tokenize(mt_lines[i]);
    check_length_cap(sample.src, paths.src, line_no, options.max_length);
    check_length_cap(sample.mt, paths.mt, line_no, options.max_length);
    if (!align_lines.empty()) {
      try {
        sample.alignments = parse_alignments(align_lines[i], sample.src.size(),
                                             sample.mt.size());
      } catch (const DataError& e) {
        throw DataError(strformat("%s line %zu: %s", paths.alignments.c_str(),
                                  line_no, e.what()));
      }
    }
    if (!mt_tag_lines.empty())
      sample.mt_tags = parse_tag_line(mt_tag_lines[i], sample.mt.size(),
                                      paths.mt_tags, line_no);
    if (!gap_tag_lines.empty())
      sample.gap_tags = parse_tag_line(gap_tag_lines[i], sample.mt.size() + 1,
                                       paths.gap_tags, line_no);
    if (!src_tag_lines.empty())
      sample.src_tags = parse_tag_line(src_tag_lines[i], sample.src.size(),
                                       paths.src_tags, line_no);
    if (!hter_lines.empty())
      sample.hter = parse_hter_line(hter_lines[i], paths.hter, line_no);
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::vector<SentenceTriplet> load_triplets(const std::string& src_path,
                                           const std::string& mt_path,
                                           const std::string& pe_path,
                                           const std::string& alignments_path,
                                           const LoadOptions& options) {
  const auto src_lines = read_lines(src_path);
  const auto mt_lines = read_lines(mt_path);
  const auto pe_lines = read_lines(pe_path);
  check_line_count(mt_path, mt_lines.size(), src_lines.size(), src_path);
  check_line_count(pe_path, pe_lines.size(), src_lines.size(), src_path);
  std::vector<std::string> align_lines;
  if (!alignments_path.empty()) {
    align_lines = read_lines(alignments_path);
    check_line_count(alignments_path, align_lines.size(), src_lines.size(),
                     src_path);
  }

  std::vector<SentenceTriplet> triplets;
  triplets.reserve(src_lines.size());
  for (size_t i = 0; i < src_lines.size(); ++i) {
    const size_t line_no = i + 1;
    SentenceTriplet t;
    t.src = tokenize(src_lines[i]);
    t.mt = tokenize(mt_lines[i]);
    t.pe = tokenize(pe_lines[i]);
    check_length_cap(t.src, src_path, line_no, options.max_length);
    check_length_cap(t.mt, mt_path, line_no, options.max_length);
    check_length_cap(t.pe, pe_path, line_no, options.max_length);
    if (!align_lines.empty()) {
      try {
        t.alignments =
            parse_alignments(align_lines[i], t.src.size(), t.mt.size());
      } catch (const DataError& e) {
        throw DataError(strformat("%s line %zu: %s", alignments_path.c_str(),
                                  line_no, e.what()));
      }
    }
    triplets.push_back(std::move(t));
  }
  return triplets;
}

}  // namespace kiwi::data
