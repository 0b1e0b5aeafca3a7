#include "kiwi/ensemble/ensemble.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "kiwi/data/vocab.hpp"
#include "kiwi/numerics/tensor.hpp"

namespace kiwi::ensemble {

std::string stream_name(Stream s) {
  switch (s) {
    case Stream::Mt: return "mt";
    case Stream::Gaps: return "gaps";
    case Stream::Source: return "source";
    case Stream::Hter: return "hter";
  }
  return "mt";
}

Stream parse_stream(const std::string& name) {
  if (name == "mt") return Stream::Mt;
  if (name == "gaps") return Stream::Gaps;
  if (name == "source") return Stream::Source;
  if (name == "hter") return Stream::Hter;
  throw ConfigError("unknown stream '" + name + "'");
}

SystemPrediction average_predictions(
    const std::vector<SystemPrediction>& systems) {
  if (systems.empty())
    throw DataError("average_predictions: needs at least one system");
  const auto& first = systems.front();
  for (const auto& sys : systems) {
    if (sys.word_probs.size() != first.word_probs.size() ||
        sys.sentence_scores.size() != first.sentence_scores.size())
      throw DataError("average_predictions: systems cover different streams");
    for (const auto& [stream, rows] : first.word_probs) {
      auto it = sys.word_probs.find(stream);
      if (it == sys.word_probs.end() || it->second.size() != rows.size())
        throw DataError("average_predictions: stream shapes differ");
      for (size_t s = 0; s < rows.size(); ++s)
        if (it->second[s].size() != rows[s].size())
          throw DataError(strformat(
              "average_predictions: sentence %zu has mismatched lengths", s));
    }
  }

  SystemPrediction avg;
  avg.system_id = "average";
  const double k = static_cast<double>(systems.size());
  for (const auto& [stream, rows] : first.word_probs) {
    auto& out_rows = avg.word_probs[stream];
    out_rows.resize(rows.size());
    for (size_t s = 0; s < rows.size(); ++s) {
      out_rows[s].assign(rows[s].size(), 0.0);
      for (const auto& sys : systems) {
        const auto& in = sys.word_probs.at(stream)[s];
        for (size_t i = 0; i < in.size(); ++i) out_rows[s][i] += in[i];
      }
      for (auto& v : out_rows[s]) v /= k;
    }
  }
  avg.sentence_scores.assign(first.sentence_scores.size(), 0.0);
  for (const auto& sys : systems)
    for (size_t i = 0; i < sys.sentence_scores.size(); ++i)
      avg.sentence_scores[i] += sys.sentence_scores[i];
  for (auto& v : avg.sentence_scores) v /= k;
  return avg;
}

TagVector tags_from_probs(const std::vector<double>& probs, double threshold) {
  TagVector tags;
  tags.reserve(probs.size());
  for (double p : probs) tags.push_back(p >= threshold ? Tag::BAD : Tag::OK);
  return tags;
}

void write_probs_file(const std::string& path,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write predictions to " + path);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) f << ' ';
      f << strformat("%.6f", row[i]);
    }
    f << '\n';
  }
  f.flush();
  if (!f) throw DataError("write failed for " + path);
}

std::vector<std::vector<double>> read_probs_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open predictions " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> row;
    std::istringstream stream(line);
    std::string tok;
    while (stream >> tok) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw DataError(strformat("%s line %zu: invalid probability '%s'",
                                  path.c_str(), line_no, tok.c_str()));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_scores_file(const std::string& path,
                       const std::vector<double>& scores) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write scores to " + path);
  for (double s : scores) f << strformat("%.6f", s) << '\n';
  f.flush();
  if (!f) throw DataError("write failed for " + path);
}

std::vector<double> read_scores_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open scores " + path);
  std::vector<double> scores;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      scores.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw DataError(strformat("%s line %zu: invalid score '%s'",
                                path.c_str(), line_no, line.c_str()));
    }
  }
  return scores;
}

namespace {

const std::string& word_at(const std::vector<std::string>& tokens, long i,
                           bool start_side) {
  static const std::string start = data::kStartToken;
  static const std::string stop = data::kStopToken;
  if (i < 0) return start;
  if (i >= static_cast<long>(tokens.size())) return start_side ? start : stop;
  return tokens[static_cast<size_t>(i)];
}

}  // namespace

FeatureRow extract_features(const data::QESample& sample, size_t token,
                            const std::vector<SystemPrediction>& systems,
                            size_t sentence_index) {
  if (token >= sample.mt.size())
    throw DataError(strformat("feature extraction: token %zu out of range "
                              "for %zu-token sentence",
                              token, sample.mt.size()));
  const long i = static_cast<long>(token);
  const auto& mt = sample.mt;
  FeatureRow row;
  const std::string& cur = mt[token];
  const std::string& left = word_at(mt, i - 1, true);
  const std::string& right = word_at(mt, i + 1, false);
  row.emplace_back("w=" + cur, 1.0);
  row.emplace_back("w-1=" + left, 1.0);
  row.emplace_back("w+1=" + right, 1.0);
  row.emplace_back("bi-1=" + left + "_" + cur, 1.0);
  row.emplace_back("bi+1=" + cur + "_" + right, 1.0);

  // Leftmost aligned source token and its neighbors.
  long aligned = -1;
  for (const auto& [si, mi] : sample.alignments)
    if (mi == static_cast<int>(token) && (aligned < 0 || si < aligned))
      aligned = si;
  if (aligned < 0) {
    row.emplace_back(std::string("aw=") + data::kUnalignedToken, 1.0);
  } else {
    row.emplace_back("aw=" + word_at(sample.src, aligned, true), 1.0);
    row.emplace_back("aw-1=" + word_at(sample.src, aligned - 1, true), 1.0);
    row.emplace_back("aw+1=" + word_at(sample.src, aligned + 1, false), 1.0);
  }

  for (const auto& sys : systems) {
    auto it = sys.word_probs.find(Stream::Mt);
    if (it == sys.word_probs.end())
      throw DataError("stacker features need MT-stream predictions from "
                      "system '" + sys.system_id + "'");
    const auto& probs = it->second;
    if (sentence_index >= probs.size() ||
        token >= probs[sentence_index].size())
      throw DataError(strformat(
          "system '%s' predictions do not cover sentence %zu token %zu",
          sys.system_id.c_str(), sentence_index, token));
    const double p = probs[sentence_index][token];
    row.emplace_back("sys:" + sys.system_id + ":prob", p);
    const int bin = std::min(9, static_cast<int>(p * 10.0));
    row.emplace_back(strformat("sys:%s:bin=%d", sys.system_id.c_str(), bin),
                     1.0);
  }
  return row;
}

std::vector<size_t> make_folds(size_t n_samples, size_t n_folds,
                               uint64_t seed) {
  if (n_folds < 2) throw ConfigError("jackknife needs at least 2 folds");
  std::vector<size_t> order(n_samples);
  std::iota(order.begin(), order.end(), size_t{0});
  numerics::UniformSampler rng(seed);
  numerics::deterministic_shuffle(order, rng);
  std::vector<size_t> fold(n_samples, 0);
  for (size_t i = 0; i < n_samples; ++i) fold[order[i]] = i % n_folds;
  return fold;
}

}  // namespace kiwi::ensemble
