#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boostkit/active.hpp"
#include "boostkit/booster.hpp"

namespace boostkit {

enum class StrategySelection { uncertainty, random, both };

/// Every tunable of every command, as one flat key=value document.
///
///   key            default     meaning
///   rounds         100         boosting rounds T
///   loss           exp         exp | logistic (prior and cde runs always use logistic)
///   stump          binary      binary | confidence
///   smoothing      auto        nonnegative real; auto = 1/(2m)
///   alpha          auto        auto | closed | line | unit
///   seed           1           64-bit seed for every randomized step
///   label_col      label       label column name
///   prior_col      (none)      prior column name; enables prior-knowledge boosting
///   prior_rules    (none)      rule-table file; enables prior-knowledge boosting
///   eta            (none)      prior weight; required with a prior, no default
///   epsilon_clip   1e-6        probability clip inside the relative entropy
///   test_fraction  (none)      hold out this fraction of --data as test set
///   k              10          cde breakpoints
///   n_samples      1           cde samples per row
///   level          0.5         cde quantile level
///   strategy       both        uncertainty | random | both
///   init           500         active-learning initial random batch
///   batch          200         active-learning batch size
///   iterations     10          active-learning acquisition rounds
///   seeds          1           active-learning runs, seeds seed .. seed+seeds-1
///
/// Files: one "key = value" per line; '#' starts a comment line. Unknown or
/// repeated keys are rejected.
struct ExperimentConfig {
  std::size_t rounds = 100;
  std::optional<LossKind> loss;
  StumpMode stump = StumpMode::binary;
  std::optional<double> smoothing;
  std::optional<AlphaStrategy> alpha;
  std::uint64_t seed = 1;
  std::string label_col = "label";
  std::optional<std::string> prior_col;
  std::optional<std::string> prior_rules;
  std::optional<double> eta;
  double epsilon_clip = 1e-6;
  std::optional<double> test_fraction;
  std::size_t k = 10;
  std::size_t n_samples = 1;
  double level = 0.5;
  StrategySelection strategy = StrategySelection::both;
  std::size_t init = 500;
  std::size_t batch = 200;
  std::size_t iterations = 10;
  std::size_t seeds = 1;

  /// Throws UsageError for an unknown key or an unparseable value.
  void set(const std::string& key, const std::string& value);

  static bool is_key(const std::string& key);
  static const std::vector<std::string>& keys();

  /// Throws UsageError naming the file line on any problem.
  static ExperimentConfig parse(std::istream& in, const std::string& source = "<stream>");
  static ExperimentConfig load(const std::string& path);

  bool uses_prior() const noexcept { return prior_col.has_value() || prior_rules.has_value(); }

  /// Boosting settings with `default_loss` filling an unset loss.
  BoostConfig boost(LossKind default_loss) const;

  /// Resolved values of every key, in keys() order, for model provenance.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

} // namespace boostkit
