#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boostkit/booster.hpp"

namespace boostkit {

/// Fully labeled examples whose labels stay hidden until acquired.
/// The only label-bearing view is labeled_dataset().
class Pool {
public:
  explicit Pool(const Dataset& examples);

  std::size_t size() const noexcept { return examples_->size(); }
  std::size_t unlabeled_count() const noexcept { return size() - labeled_.size(); }
  std::size_t budget_used() const noexcept { return labeled_.size(); }
  std::span<const double> features(std::size_t i) const { return examples_->x(i); }
  bool is_labeled(std::size_t i) const { return is_labeled_.at(i); }
  /// Acquisition order.
  const std::vector<std::size_t>& labeled_ids() const noexcept { return labeled_; }

  /// Throws UsageError on out-of-range, repeated, or already-labeled ids.
  void acquire(std::span<const std::size_t> ids);
  /// Acquired rows with their labels, in acquisition order.
  Dataset labeled_dataset() const;

private:
  const Dataset* examples_;
  std::vector<std::size_t> labeled_;
  std::vector<bool> is_labeled_;
};

struct QuerySelection {
  std::vector<std::size_t> indices;
  /// Fewer than k unlabeled examples remained.
  bool truncated = false;
};

/// The k unlabeled ids with smallest |f(x)|, ties by ascending id, in that order.
QuerySelection select_queries(const AdditiveModel& model, const Pool& pool, std::size_t k);

enum class QueryStrategy { uncertainty, random };

std::string to_string(QueryStrategy strategy);

struct ActiveConfig {
  std::size_t init_batch = 500;
  std::size_t batch = 200;
  std::size_t iterations = 10;
  QueryStrategy strategy = QueryStrategy::uncertainty;
  BoostConfig boost;
  std::uint64_t seed = 1;

  void validate() const;
};

struct CurvePoint {
  QueryStrategy strategy = QueryStrategy::uncertainty;
  std::uint64_t seed = 0;
  std::size_t iteration = 0;
  std::size_t labels_used = 0;
  double test_error = 0.0;
};

struct SimulationResult {
  std::vector<CurvePoint> curve;
  /// Ids acquired at each iteration (iteration 0 is the random seed batch).
  std::vector<std::vector<std::size_t>> batches;
  /// The pool ran out before the configured number of iterations.
  bool truncated = false;
};

using ActiveTrainer = std::function<AdditiveModel(const Dataset& labeled)>;

/// Pool-based simulation on a fully labeled dataset. Iteration 0 labels
/// init_batch examples drawn by a seeded permutation; each later iteration
/// retrains from scratch on every labeled example and acquires `batch` more.
/// The random strategy keeps walking the same permutation, so the two
/// strategies share iteration 0 for a given seed. `trainer` defaults to
/// train(labeled, cfg.boost).
SimulationResult simulate(const Dataset& ds, const Dataset& test, const ActiveConfig& cfg,
                          const ActiveTrainer& trainer = {});

/// Labels used at the first iteration whose test error is <= target.
std::optional<std::size_t> labels_to_reach(std::span<const CurvePoint> curve, double target);

void write_curve_header(std::ostream& out);
void write_curve_rows(std::span<const CurvePoint> curve, std::ostream& out);

} // namespace boostkit
