#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kiwi/metrics/metrics.hpp"
#include "kiwi/numerics/tensor.hpp"

using namespace kiwi;
using namespace kiwi::metrics;

namespace {

// Independent oracles, written over long double and deliberately not
// sharing code with the implementation.

double oracle_f1(const TagVector& gold, const TagVector& pred, Tag positive) {
  long double tp = 0, pred_pos = 0, gold_pos = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] == positive) ++pred_pos;
    if (gold[i] == positive) ++gold_pos;
    if (gold[i] == positive && pred[i] == positive) ++tp;
  }
  if (pred_pos == 0 || gold_pos == 0) {
    // F1 defined as 0 when either precision or recall is undefined/zero.
    if (tp == 0) return 0.0;
  }
  const long double precision = pred_pos > 0 ? tp / pred_pos : 0.0L;
  const long double recall = gold_pos > 0 ? tp / gold_pos : 0.0L;
  if (precision + recall == 0.0L) return 0.0;
  return static_cast<double>(2.0L * precision * recall / (precision + recall));
}

double oracle_pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const size_t n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double cov = sxy - sx * sy / n;
  const long double vx = sxx - sx * sx / n;
  const long double vy = syy - sy * sy / n;
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

// Rank-difference formula; valid only for tie-free data.
double oracle_spearman_tiefree(const std::vector<double>& x,
                               const std::vector<double>& y) {
  const size_t n = x.size();
  auto ranks = [](const std::vector<double>& v) {
    std::vector<size_t> order(v.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (size_t i = 0; i < v.size(); ++i)
      r[order[i]] = static_cast<double>(i + 1);
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  long double d2 = 0;
  for (size_t i = 0; i < n; ++i) {
    const long double d = rx[i] - ry[i];
    d2 += d * d;
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(1.0L - 6.0L * d2 / (nn * (nn * nn - 1.0L)));
}

}  // namespace

TEST_CASE("f1_mult fixed cases") {
  SUBCASE("perfect prediction with both classes") {
    const TagVector gold{Tag::OK, Tag::BAD, Tag::OK};
    const auto report = f1_mult(gold, gold);
    CHECK(report.f1_ok == doctest::Approx(1.0));
    CHECK(report.f1_bad == doctest::Approx(1.0));
    CHECK(report.f1_mult == doctest::Approx(1.0));
  }
  SUBCASE("all-OK prediction against gold with BAD tags") {
    const TagVector gold{Tag::OK, Tag::BAD, Tag::OK};
    const TagVector pred{Tag::OK, Tag::OK, Tag::OK};
    const auto report = f1_mult(gold, pred);
    CHECK(report.f1_bad == 0.0);
    CHECK(report.f1_mult == 0.0);
  }
  SUBCASE("hand-computed confusion matrix") {
    const TagVector gold{Tag::OK, Tag::BAD, Tag::OK, Tag::OK};
    const TagVector pred{Tag::OK, Tag::BAD, Tag::BAD, Tag::OK};
    const auto report = f1_mult(gold, pred);
    CHECK(report.f1_ok == doctest::Approx(0.8000).epsilon(1e-4));
    CHECK(report.f1_bad == doctest::Approx(0.6667).epsilon(1e-4));
    CHECK(report.f1_mult == doctest::Approx(0.5333).epsilon(1e-4));
  }
  SUBCASE("length mismatch is an error") {
    CHECK_THROWS_AS(f1_mult({Tag::OK}, {Tag::OK, Tag::BAD}), MetricError);
  }
  SUBCASE("f1_mult is the product of the per-class scores") {
    numerics::UniformSampler rng(2);
    for (int round = 0; round < 100; ++round) {
      TagVector gold, pred;
      const size_t n = 1 + rng.next_index(40);
      for (size_t i = 0; i < n; ++i) {
        gold.push_back(rng.next() < 0.3 ? Tag::BAD : Tag::OK);
        pred.push_back(rng.next() < 0.3 ? Tag::BAD : Tag::OK);
      }
      const auto report = f1_mult(gold, pred);
      CHECK(std::fabs(report.f1_mult - report.f1_ok * report.f1_bad) <=
            1e-12);
    }
  }
}

TEST_CASE("pearson fixed cases") {
  CHECK(pearson({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {-1, -2, -3}) == doctest::Approx(-1.0));
  CHECK(pearson({1, 2, 3}, {1, 2, 4}) ==
        doctest::Approx(0.9820).epsilon(1e-4));
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), MetricError);
  CHECK_THROWS_AS(pearson({1}, {2}), MetricError);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), MetricError);
}

TEST_CASE("spearman fixed cases") {
  CHECK(spearman({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8));
  CHECK(spearman({1, 2, 3}, {10, 200, 3000}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spearman({2, 2, 2}, {1, 2, 3}), MetricError);
}

TEST_CASE("spearman handles ties with average ranks") {
  CHECK(average_ranks({10, 20, 20, 30}) ==
        std::vector<double>{1.0, 2.5, 2.5, 4.0});
  CHECK(average_ranks({5, 5, 5}) == std::vector<double>{2.0, 2.0, 2.0});
  // Hand-computed: x ranks {1, 2.5, 2.5, 4}, y ranks {1, 2, 3, 4}.
  const double rho = spearman({1, 2, 2, 3}, {1, 2, 3, 4});
  const double expected = oracle_pearson({1, 2.5, 2.5, 4}, {1, 2, 3, 4});
  CHECK(rho == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("metrics match independent oracles on random instances") {
  numerics::UniformSampler rng(41);
  for (int round = 0; round < 1000; ++round) {
    const size_t n = 2 + rng.next_index(60);

    // f1_mult with at least some variation
    TagVector gold, pred;
    for (size_t i = 0; i < n; ++i) {
      gold.push_back(rng.next() < 0.4 ? Tag::BAD : Tag::OK);
      pred.push_back(rng.next() < 0.4 ? Tag::BAD : Tag::OK);
    }
    const auto report = f1_mult(gold, pred);
    CHECK(std::fabs(report.f1_ok - oracle_f1(gold, pred, Tag::OK)) <= 1e-9);
    CHECK(std::fabs(report.f1_bad - oracle_f1(gold, pred, Tag::BAD)) <= 1e-9);

    // pearson on non-constant data
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.next(-5.0, 5.0);
      y[i] = rng.next(-5.0, 5.0);
    }
    CHECK(std::fabs(pearson(x, y) - oracle_pearson(x, y)) <= 1e-9);

    // spearman on tie-free data (distinct values with probability 1)
    CHECK(std::fabs(spearman(x, y) - oracle_spearman_tiefree(x, y)) <= 1e-9);
  }
}

TEST_CASE("metric invariances") {
  numerics::UniformSampler rng(43);
  for (int round = 0; round < 50; ++round) {
    const size_t n = 3 + rng.next_index(30);
    std::vector<double> x(n), y(n);
    TagVector gold, pred;
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.next(-2.0, 2.0);
      y[i] = rng.next(-2.0, 2.0);
      gold.push_back(rng.next() < 0.5 ? Tag::BAD : Tag::OK);
      pred.push_back(rng.next() < 0.5 ? Tag::BAD : Tag::OK);
    }

    // pearson(ax + b, y) == pearson(x, y) for a > 0
    std::vector<double> scaled(n);
    const double a = 0.1 + rng.next() * 3.0, b = rng.next(-4.0, 4.0);
    for (size_t i = 0; i < n; ++i) scaled[i] = a * x[i] + b;
    CHECK(std::fabs(pearson(scaled, y) - pearson(x, y)) <= 1e-12);

    // f1 is invariant under a joint permutation
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});
    numerics::deterministic_shuffle(perm, rng);
    TagVector gold_p(n), pred_p(n);
    for (size_t i = 0; i < n; ++i) {
      gold_p[i] = gold[perm[i]];
      pred_p[i] = pred[perm[i]];
    }
    const auto r1 = f1_mult(gold, pred);
    const auto r2 = f1_mult(gold_p, pred_p);
    CHECK(r1.f1_mult == doctest::Approx(r2.f1_mult).epsilon(1e-12));

    // spearman equals pearson on pre-ranked tie-free data
    const auto rx = average_ranks(x), ry = average_ranks(y);
    CHECK(std::fabs(spearman(x, y) - pearson(rx, ry)) <= 1e-12);
  }
}
