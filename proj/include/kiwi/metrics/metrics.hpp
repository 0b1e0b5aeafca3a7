#pragma once

#include <vector>

#include "kiwi/tag.hpp"

namespace kiwi::metrics {

struct WordMetricReport {
  double f1_ok = 0.0;
  double f1_bad = 0.0;
  double f1_mult = 0.0;
};

struct SentenceMetricReport {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
};

// Micro-averaged per-class F1 over the concatenated corpus tag stream,
// with the convention F1 = 0 when precision + recall = 0.
WordMetricReport f1_mult(const TagVector& gold, const TagVector& predicted);

// Sample Pearson correlation. Throws MetricError on length < 2 or when
// either vector has zero variance (undefined correlation is never 0).
double pearson(const std::vector<double>& gold,
               const std::vector<double>& predicted);

// Pearson correlation of ranks; ties receive average ranks. Throws
// MetricError on length < 2 or an all-equal vector.
double spearman(const std::vector<double>& gold,
                const std::vector<double>& predicted);

// Average ranks (1-based) with ties averaged; exposed for tests.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace kiwi::metrics
