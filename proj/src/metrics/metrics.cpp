#include "kiwi/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kiwi::metrics {

namespace {

double class_f1(const TagVector& gold, const TagVector& predicted,
                Tag positive) {
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == positive;
    const bool p = predicted[i] == positive;
    if (g && p) ++tp;
    if (!g && p) ++fp;
    if (g && !p) ++fn;
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  if (denom == 0.0) return 0.0;  // precision + recall undefined or zero
  return 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace

WordMetricReport f1_mult(const TagVector& gold, const TagVector& predicted) {
  if (gold.size() != predicted.size())
    throw MetricError(strformat(
        "f1_mult: gold has %zu tags but prediction has %zu tags", gold.size(),
        predicted.size()));
  WordMetricReport report;
  report.f1_ok = class_f1(gold, predicted, Tag::OK);
  report.f1_bad = class_f1(gold, predicted, Tag::BAD);
  report.f1_mult = report.f1_ok * report.f1_bad;
  return report;
}

double pearson(const std::vector<double>& gold,
               const std::vector<double>& predicted) {
  if (gold.size() != predicted.size())
    throw MetricError("pearson: vectors differ in length");
  const size_t n = gold.size();
  if (n < 2) throw MetricError("pearson: needs at least 2 points");
  double mean_x = 0.0, mean_y = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_x += gold[i];
    mean_y += predicted[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = gold[i] - mean_x;
    const double dy = predicted[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw MetricError(
        "pearson: undefined correlation (a vector has zero variance)");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j share the same value; assign the average rank.
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& gold,
                const std::vector<double>& predicted) {
  if (gold.size() != predicted.size())
    throw MetricError("spearman: vectors differ in length");
  if (gold.size() < 2) throw MetricError("spearman: needs at least 2 points");
  try {
    return pearson(average_ranks(gold), average_ranks(predicted));
  } catch (const MetricError&) {
    throw MetricError(
        "spearman: undefined correlation (a vector is all-equal)");
  }
}

}  // namespace kiwi::metrics
