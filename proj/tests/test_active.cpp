#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "boostkit/active.hpp"
#include "boostkit/error.hpp"
#include "support/generators.hpp"

using namespace boostkit;

namespace {

// Model whose score is exactly the given value per row: one stump per row on
// feature 0 holding the row index.
Dataset index_pool(std::size_t m) {
  std::vector<double> x(m), y(m, 1.0);
  std::iota(x.begin(), x.end(), 0.0);
  return Dataset(FeatureMatrix(m, 1, x), y);
}

AdditiveModel score_table(const std::vector<double>& f) {
  AdditiveModel model(LossKind::exponential);
  double previous = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    // Adds (f_i - f_{i-1}) to every row with index >= i.
    model.add(Term{f[i] - previous, Stump{0, static_cast<double>(i) - 0.5, 0.0, 1.0}});
    previous = f[i];
  }
  return model;
}

std::vector<std::size_t> sort_oracle(const AdditiveModel& model, const Pool& pool, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!pool.is_labeled(i)) keyed.emplace_back(std::abs(model.score(pool.features(i))), i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < std::min(k, keyed.size()); ++i) ids.push_back(keyed[i].second);
  return ids;
}

ActiveConfig small_config(QueryStrategy strategy, std::uint64_t seed) {
  ActiveConfig cfg;
  cfg.init_batch = 20;
  cfg.batch = 10;
  cfg.iterations = 4;
  cfg.strategy = strategy;
  cfg.boost.rounds = 10;
  cfg.seed = seed;
  return cfg;
}

} // namespace

TEST_CASE("select_queries examples") {
  const auto ds = index_pool(3);
  Pool pool(ds);
  CHECK(select_queries(score_table({3.0, 0.1, 2.0}), pool, 1).indices == std::vector<std::size_t>{1});
  CHECK(select_queries(score_table({0.5, -0.5, 2.0}), pool, 1).indices == std::vector<std::size_t>{0});
  CHECK(select_queries(score_table({0.0, 0.0, 0.0}), pool, 2).indices == std::vector<std::size_t>{0, 1});
  const auto all = select_queries(score_table({1, 2, 3}), pool, 5);
  CHECK(all.truncated);
  CHECK(all.indices.size() == 3);
}

TEST_CASE("select_queries property: equals the sort oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = testgen::between(rng, 2, 40);
    const auto ds = index_pool(m);
    std::vector<double> f(m);
    for (auto& v : f) v = std::round(rng.uniform(-3, 3) * 4) / 4; // many ties
    const auto model = score_table(f);
    Pool pool(ds);
    const auto pre = rng.permutation(m);
    const std::size_t labeled = rng.uniform_index(m);
    pool.acquire(std::span(pre).first(labeled));
    const std::size_t k = testgen::between(rng, 1, m);
    const auto got = select_queries(model, pool, k);
    CHECK(got.indices == sort_oracle(model, pool, k));
    CHECK(got.truncated == (k > m - labeled));
  }
}

TEST_CASE("pool bookkeeping") {
  const auto ds = index_pool(5);
  Pool pool(ds);
  CHECK_THROWS_AS(pool.labeled_dataset(), UsageError);
  const std::vector<std::size_t> first{3, 1};
  pool.acquire(first);
  CHECK(pool.budget_used() == 2);
  CHECK(pool.unlabeled_count() == 3);
  CHECK(pool.labeled_dataset().x(0)[0] == 3.0);
  CHECK_THROWS_AS(pool.acquire(std::vector<std::size_t>{1}), UsageError);
  CHECK_THROWS_AS(pool.acquire(std::vector<std::size_t>{9}), UsageError);
  CHECK_THROWS_AS(pool.acquire(std::vector<std::size_t>{0, 0}), UsageError);
  CHECK(pool.budget_used() == 2);
}

TEST_CASE("simulate: batches follow the strategy and labels never leak") {
  Rng rng(2);
  const auto ds = testgen::threshold_task(rng, 300, 2, 0.3);
  const auto test = testgen::threshold_task(rng, 200, 2, 0.3);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto cfg = small_config(QueryStrategy::uncertainty, seed);
    std::vector<AdditiveModel> models;
    std::vector<std::set<std::vector<double>>> seen_rows;
    const auto trainer = [&](const Dataset& labeled) {
      std::set<std::vector<double>> rows;
      for (std::size_t i = 0; i < labeled.size(); ++i) rows.insert({labeled.x(i).begin(), labeled.x(i).end()});
      seen_rows.push_back(rows);
      models.push_back(train(labeled, cfg.boost).model);
      return models.back();
    };
    const auto result = simulate(ds, test, cfg, trainer);
    REQUIRE(result.curve.size() == cfg.iterations + 1);
    REQUIRE(result.batches.size() == cfg.iterations + 1);
    CHECK(result.batches[0].size() == cfg.init_batch);

    // Replay the pool to check each batch against the oracle and each
    // training call against the labeled set at that moment.
    Pool pool(ds);
    pool.acquire(result.batches[0]);
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
      std::set<std::vector<double>> expected;
      for (auto id : pool.labeled_ids()) expected.insert({ds.x(id).begin(), ds.x(id).end()});
      CHECK(seen_rows[it - 1] == expected);
      CHECK(result.batches[it] == sort_oracle(models[it - 1], pool, cfg.batch));
      pool.acquire(result.batches[it]);
    }
    for (std::size_t it = 0; it <= cfg.iterations; ++it) {
      CHECK(result.curve[it].labels_used == cfg.init_batch + it * cfg.batch);
      CHECK(result.curve[it].iteration == it);
    }

    const auto random = simulate(ds, test, small_config(QueryStrategy::random, seed));
    const auto uncertain = simulate(ds, test, small_config(QueryStrategy::uncertainty, seed));
    CHECK(random.batches[0] == uncertain.batches[0]);
    CHECK(random.curve[0].test_error == uncertain.curve[0].test_error);
  }
}

TEST_CASE("simulate: truncation and config checks") {
  Rng rng(3);
  const auto ds = testgen::threshold_task(rng, 40);
  const auto test = testgen::threshold_task(rng, 20);
  auto cfg = small_config(QueryStrategy::uncertainty, 1);
  cfg.iterations = 5;
  const auto r = simulate(ds, test, cfg);
  CHECK(r.truncated);
  CHECK(r.curve.back().labels_used == 40);
  cfg.batch = 0;
  CHECK_THROWS_AS(simulate(ds, test, cfg), UsageError);
}

TEST_CASE("curve output and labels_to_reach") {
  std::vector<CurvePoint> curve{{QueryStrategy::random, 4, 0, 10, 0.3},
                                {QueryStrategy::random, 4, 1, 20, 0.04},
                                {QueryStrategy::random, 4, 2, 30, 0.06}};
  CHECK(labels_to_reach(curve, 0.05) == std::optional<std::size_t>{20});
  CHECK_FALSE(labels_to_reach(curve, 0.01));
  std::ostringstream out;
  write_curve_header(out);
  write_curve_rows(curve, out);
  CHECK(out.str() == "strategy,seed,iteration,labels_used,test_error\nrandom,4,0,10,0.3\nrandom,4,1,20,0.04\n"
                     "random,4,2,30,0.06\n");
}
