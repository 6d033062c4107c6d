#include "boostkit/active.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

Pool::Pool(const Dataset& examples) : examples_(&examples), is_labeled_(examples.size(), false) {}

void Pool::acquire(std::span<const std::size_t> ids) {
  // Validate the whole batch first so a bad request leaves the pool unchanged.
  std::vector<bool> requested(size(), false);
  for (const auto id : ids) {
    if (id >= size()) {
      throw UsageError("pool id " + std::to_string(id) + " out of range");
    }
    if (is_labeled_[id] || requested[id]) {
      throw UsageError("pool id " + std::to_string(id) + " already labeled");
    }
    requested[id] = true;
  }
  for (const auto id : ids) {
    is_labeled_[id] = true;
    labeled_.push_back(id);
  }
}

Dataset Pool::labeled_dataset() const {
  if (labeled_.empty()) {
    throw UsageError("no labeled examples yet");
  }
  return subset(*examples_, labeled_);
}

QuerySelection select_queries(const AdditiveModel& model, const Pool& pool, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(pool.unlabeled_count());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!pool.is_labeled(i)) {
      candidates.emplace_back(std::abs(model.score(pool.features(i))), i);
    }
  }
  QuerySelection selection;
  if (candidates.size() < k) {
    selection.truncated = true;
    k = candidates.size();
  }
  const auto middle = candidates.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(candidates.begin(), middle, candidates.end());
  selection.indices.reserve(k);
  for (auto it = candidates.begin(); it != middle; ++it) {
    selection.indices.push_back(it->second);
  }
  return selection;
}

std::string to_string(QueryStrategy strategy) {
  return strategy == QueryStrategy::uncertainty ? "uncertainty" : "random";
}

void ActiveConfig::validate() const {
  if (init_batch < 1) {
    throw UsageError("init_batch must be at least 1");
  }
  if (batch < 1) {
    throw UsageError("batch must be at least 1");
  }
  boost.validate();
}

SimulationResult simulate(const Dataset& ds, const Dataset& test, const ActiveConfig& cfg,
                          const ActiveTrainer& trainer) {
  cfg.validate();
  if (!ds.is_classification() || !test.is_classification()) {
    throw DataError("active learning simulation requires classification datasets");
  }
  if (test.dimension() != ds.dimension()) {
    throw DataError("test data has " + std::to_string(test.dimension()) + " features, pool has " +
                    std::to_string(ds.dimension()));
  }
  const ActiveTrainer fit = trainer ? trainer : ActiveTrainer([&cfg](const Dataset& labeled) {
    return train(labeled, cfg.boost).model;
  });

  SimulationResult result;
  Pool pool(ds);
  Rng rng(cfg.seed);
  const auto order = rng.permutation(ds.size());
  std::size_t cursor = std::min(cfg.init_batch, ds.size());
  result.truncated = cursor < cfg.init_batch;
  result.batches.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cursor));
  pool.acquire(result.batches.back());

  const auto record = [&](std::size_t iteration, const AdditiveModel& model) {
    result.curve.push_back({cfg.strategy, cfg.seed, iteration, pool.budget_used(), error_rate(model, test)});
  };
  AdditiveModel model = fit(pool.labeled_dataset());
  record(0, model);

  for (std::size_t iteration = 1; iteration <= cfg.iterations; ++iteration) {
    if (pool.unlabeled_count() == 0) {
      result.truncated = true;
      break;
    }
    std::vector<std::size_t> batch;
    if (cfg.strategy == QueryStrategy::uncertainty) {
      auto selection = select_queries(model, pool, cfg.batch);
      result.truncated = result.truncated || selection.truncated;
      batch = std::move(selection.indices);
    } else {
      while (batch.size() < cfg.batch && cursor < order.size()) {
        batch.push_back(order[cursor++]);
      }
      result.truncated = result.truncated || batch.size() < cfg.batch;
    }
    pool.acquire(batch);
    result.batches.push_back(std::move(batch));
    model = fit(pool.labeled_dataset());
    record(iteration, model);
  }
  return result;
}

std::optional<std::size_t> labels_to_reach(std::span<const CurvePoint> curve, double target) {
  for (const auto& point : curve) {
    if (point.test_error <= target) {
      return point.labels_used;
    }
  }
  return std::nullopt;
}

void write_curve_header(std::ostream& out) {
  out << "strategy,seed,iteration,labels_used,test_error\n";
}

void write_curve_rows(std::span<const CurvePoint> curve, std::ostream& out) {
  for (const auto& point : curve) {
    out << to_string(point.strategy) << ',' << point.seed << ',' << point.iteration << ',' << point.labels_used
        << ',' << detail::format_double(point.test_error) << '\n';
  }
}

} // namespace boostkit
