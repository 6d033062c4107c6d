#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boostkit/cde.hpp"
#include "boostkit/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace boostkit;

namespace {

Breakpoints two_bins() {
  Breakpoints bp;
  bp.values = {1.0};
  bp.support_lo = 0.0;
  bp.support_hi = 2.0;
  bp.requested = 1;
  return bp;
}

BoostConfig logistic_cfg(std::size_t rounds) {
  BoostConfig cfg;
  cfg.rounds = rounds;
  cfg.loss = LossKind::logistic;
  return cfg;
}

} // namespace

TEST_CASE("breakpoints: quantile rule") {
  const std::vector<double> a{4, 2, 3, 1};
  const auto bp = choose_breakpoints(a, 1);
  CHECK(bp.values == std::vector<double>{2.5});
  CHECK(bp.support_lo == 1.0);
  CHECK(bp.support_hi == 4.0);

  std::vector<double> grid(100);
  std::iota(grid.begin(), grid.end(), 0.0);
  const auto q = choose_breakpoints(grid, 3);
  REQUIRE(q.size() == 3);
  CHECK(std::abs(q.values[0] - 25) <= 1.0);
  CHECK(std::abs(q.values[1] - 50) <= 1.0);
  CHECK(std::abs(q.values[2] - 75) <= 1.0);
}

TEST_CASE("breakpoints property: match the quantile oracle after dedup") {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = testgen::between(rng, 3, 60);
    std::vector<double> y(n);
    for (auto& v : y) v = trial % 2 ? std::floor(rng.uniform(0, 5)) : rng.uniform(-2, 2);
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct < 2) continue;
    sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = testgen::between(rng, 1, distinct - 1);
    const auto bp = choose_breakpoints(y, k);
    std::vector<double> expected;
    for (std::size_t j = 1; j <= k; ++j) {
      const double b = oracle::quantile_of_sorted(sorted, static_cast<double>(j) / static_cast<double>(k + 1));
      if (expected.empty() || b > expected.back()) expected.push_back(b);
    }
    CHECK(bp.values == expected);
    CHECK(bp.requested == k);
    CHECK(bp.support_lo <= bp.values.front());
    CHECK(bp.values.back() <= bp.support_hi);
    CHECK(std::adjacent_find(bp.values.begin(), bp.values.end(), std::greater_equal<>()) == bp.values.end());
  }
}

TEST_CASE("breakpoints: errors and duplicate reduction") {
  CHECK_THROWS_AS(choose_breakpoints(std::vector<double>{3, 3, 3}, 1), DataError);
  CHECK_THROWS_AS(choose_breakpoints(std::vector<double>{1, 2, 3}, 3), UsageError);
  CHECK_THROWS_AS(choose_breakpoints(std::vector<double>{1, 2, 3}, 0), UsageError);
  const std::vector<double> heavy{0, 0, 0, 0, 0, 0, 0, 0, 1, 2};
  const auto bp = choose_breakpoints(heavy, 2);
  CHECK(bp.size() < bp.requested);
}

TEST_CASE("bin distribution: worked cases") {
  const auto one = bin_distribution(std::vector<double>{0.3});
  CHECK(one.masses[0] == doctest::Approx(0.7));
  CHECK(one.masses[1] == doctest::Approx(0.3));
  const auto repaired = bin_distribution(std::vector<double>{0.4, 0.6});
  CHECK(repaired.masses[0] == doctest::Approx(0.6));
  CHECK(repaired.masses[1] == 0.0);
  CHECK(repaired.masses[2] == doctest::Approx(0.4));
  const auto flat = bin_distribution(std::vector<double>{0.5, 0.5, 0.5});
  CHECK(flat.masses == std::vector<double>{0.5, 0.0, 0.0, 0.5});
}

TEST_CASE("bin distribution property: nonnegative and normalized for any input") {
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> q(testgen::between(rng, 1, 12));
    for (auto& v : q) v = rng.uniform() < 0.1 ? (rng.uniform() < 0.5 ? 0.0 : 1.0) : rng.uniform();
    const auto d = bin_distribution(q);
    REQUIRE(d.masses.size() == q.size() + 1);
    double sum = 0.0;
    for (double m : d.masses) {
      CHECK(m >= 0.0);
      sum += m;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("bin distribution recovers a known CDF exactly") {
  // Exceedance of Exp(1) at the breakpoints.
  const std::vector<double> b{0.2, 0.7, 1.5, 3.0};
  std::vector<double> q;
  for (double v : b) q.push_back(std::exp(-v));
  const auto d = bin_distribution(q);
  CHECK(d.masses[0] == doctest::Approx(1 - std::exp(-0.2)).epsilon(1e-15));
  CHECK(d.masses[2] == doctest::Approx(std::exp(-0.7) - std::exp(-1.5)).epsilon(1e-14));
  CHECK(d.masses[4] == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("sampling") {
  const auto bp = two_bins();
  Rng rng(4);
  const BinDistribution point{{1.0, 0.0}};
  for (int i = 0; i < 1000; ++i) {
    const double v = sample(bp, point, rng);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  const BinDistribution split{{0.7, 0.3}};
  std::size_t first = 0;
  for (int i = 0; i < 10000; ++i) first += sample(bp, split, rng) < 1.0;
  CHECK(std::abs(first / 10000.0 - 0.7) <= 0.02);

  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(sample(bp, split, a) == sample(bp, split, b));
}

TEST_CASE("quantile") {
  const auto bp = two_bins();
  const BinDistribution even{{0.5, 0.5}};
  CHECK(quantile(bp, even, 0.5) == doctest::Approx(1.0));
  CHECK(quantile(bp, even, 0.25) == doctest::Approx(0.5));
  CHECK(quantile(bp, even, 0.999) <= 2.0);
  CHECK_THROWS_AS(quantile(bp, even, 0.0), UsageError);
  CHECK_THROWS_AS(quantile(bp, even, 1.0), UsageError);

  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    Breakpoints many;
    many.support_lo = -1.0;
    double at = -1.0;
    const std::size_t k = testgen::between(rng, 1, 8);
    for (std::size_t j = 0; j < k; ++j) many.values.push_back(at += rng.uniform(0.01, 1.0));
    many.support_hi = at + rng.uniform(0.0, 1.0);
    std::vector<double> q(k);
    for (auto& v : q) v = rng.uniform();
    const auto d = bin_distribution(q);
    double last = -INFINITY;
    for (double level = 0.01; level < 1.0; level += 0.01) {
      const double v = quantile(many, d, level);
      CHECK(v >= last);
      CHECK(v >= many.support_lo);
      CHECK(v <= many.support_hi);
      last = v;
    }
    for (int s = 0; s < 50; ++s) {
      const double v = sample(many, d, rng);
      CHECK(v >= many.support_lo);
      CHECK(v <= many.support_hi);
    }
  }
}

TEST_CASE("train_cde: threshold-determined label") {
  Rng rng(7);
  const std::size_t n = 400;
  std::vector<double> x(n), y(n);
  // Exactly half the rows on each side, so the median breakpoint falls in the gap.
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -1.0 + 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    y[i] = x[i] > 0.0 ? 5.0 + rng.uniform() : rng.uniform();
  }
  const Dataset ds(FeatureMatrix(n, 1, x), y);
  const auto model = train_cde(ds, 1, logistic_cfg(50));
  const double hi[] = {0.8}, lo[] = {-0.5};
  CHECK(exceedance_probabilities(model, hi)[0] > 0.95);
  CHECK(exceedance_probabilities(model, lo)[0] < 0.05);
  CHECK(model.link == Link::sigmoid_f);
  CHECK(model.classifiers.size() == model.breakpoints.size());
}

TEST_CASE("train_cde: x-independent coin") {
  Rng rng(8);
  const std::size_t n = 5000;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(0, 1);
    y[i] = rng.uniform() < 0.3 ? 2.0 + rng.uniform() : rng.uniform();
  }
  const Dataset ds(FeatureMatrix(n, 1, x), y);
  // Breakpoint k=1 sits at the median, so use the event directly. Few rounds:
  // more of them start fitting the noise.
  auto cfg = logistic_cfg(5);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = y[i] >= 2.0 ? 1.0 : -1.0;
  const auto model = train(ds.relabeled(z), cfg).model;
  // The first stump sits at the low edge, so probe the interior.
  for (int p = 1; p < 100; ++p) {
    const double xv[] = {p / 100.0};
    CHECK(std::abs(prob_positive(model.score(xv), Link::sigmoid_f) - 0.3) <= 0.03);
  }
}

TEST_CASE("train_cde: nested events ordered on average, single-class events constant") {
  Rng rng(9);
  const std::size_t n = 600;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform(0, 1);
    y[i] = x[i] + rng.uniform(0, 1);
  }
  const Dataset ds(FeatureMatrix(n, 1, x), y);
  const auto model = train_cde(ds, 2, logistic_cfg(40));
  double q1 = 0, q2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = exceedance_probabilities(model, ds.x(i));
    q1 += q[0];
    q2 += q[1];
  }
  CHECK(q1 >= q2);

  // Repeated minimum label makes the first event all-positive.
  std::vector<double> heavy(n);
  for (std::size_t i = 0; i < n; ++i) heavy[i] = i < n / 2 ? 0.0 : rng.uniform(1, 2);
  const auto model2 = train_cde(ds.relabeled(heavy), 3, logistic_cfg(5));
  bool any_constant = false;
  for (std::size_t j = 0; j < model2.constant.size(); ++j) {
    if (model2.constant[j]) {
      any_constant = true;
      const auto q = exceedance_probabilities(model2, ds.x(0))[j];
      CHECK((std::abs(q - kConstantProbabilityClip) < 1e-12 || std::abs(q - (1 - kConstantProbabilityClip)) < 1e-12));
    }
  }
  CHECK(any_constant);
}

TEST_CASE("train_cde: requires logistic loss and checks dimension") {
  const Dataset ds(FeatureMatrix(4, 1, {0, 1, 2, 3}), {0.5, 1.5, 2.5, 3.5});
  BoostConfig cfg;
  cfg.loss = LossKind::exponential;
  CHECK_THROWS_AS(train_cde(ds, 1, cfg), UsageError);
  const auto model = train_cde(ds, 1, logistic_cfg(3));
  const double wrong[] = {1.0, 2.0};
  CHECK_THROWS_AS(conditional_distribution(model, wrong), DataError);
}
