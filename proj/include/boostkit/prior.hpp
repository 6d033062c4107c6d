#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "boostkit/booster.hpp"

namespace boostkit {

enum class Comparator { less_equal, greater };

struct PriorClause {
  std::size_t feature = 0;
  Comparator comparator = Comparator::less_equal;
  double threshold = 0.0;
  double probability = 0.5;
};

/// Hand-built p(x) = Pr[y = +1 | x]: the first matching clause wins,
/// otherwise the default probability applies.
///
/// Text form, one clause per line, then the default:
///
///     0, <=, 0.5, 0.2
///     1, >, 3.0, 0.9
///     default, 0.5
///
/// Blank lines and lines starting with '#' are ignored.
class PriorRule {
public:
  PriorRule(std::vector<PriorClause> clauses, double default_probability);

  double evaluate(std::span<const double> x) const;
  std::vector<double> evaluate(const FeatureMatrix& features) const;

  const std::vector<PriorClause>& clauses() const noexcept { return clauses_; }
  double default_probability() const noexcept { return default_; }

  static PriorRule parse(std::istream& in, const std::string& source = "<stream>");
  static PriorRule load(const std::filesystem::path& path);

private:
  std::vector<PriorClause> clauses_;
  double default_;
};

struct PriorConfig {
  /// Weight of the relative-entropy term; no default on purpose.
  double eta = 0.0;
  /// sigma(f) is clipped to [clip, 1 - clip] inside the relative entropy.
  double epsilon_clip = 1e-6;

  void validate() const;
};

/// p ln(p/q) + (1-p) ln((1-p)/(1-q)) with 0 ln 0 = 0.
/// Throws UsageError unless 0 < q < 1 and 0 <= p <= 1.
double relative_entropy(double p, double q);

/// sum_i b_i ln(1 + e^{-y_i f_i}) + eta sum_i RE(p_i || sigma(f_i)).
double prior_loss(std::span<const double> scores, const Dataset& ds, std::span<const double> prior,
                  const PriorConfig& cfg);
double prior_loss(const AdditiveModel& model, const Dataset& ds, std::span<const double> prior,
                  const PriorConfig& cfg);
/// Uses the dataset's prior column; DataError when it has none.
double prior_loss(const AdditiveModel& model, const Dataset& ds, const PriorConfig& cfg);

struct AugmentedDataset {
  Dataset data;
  /// Original row behind each augmented row.
  std::vector<std::size_t> source_rows;
};

/// Rows (x_i, y_i, b_i), (x_i, +1, eta p_i), (x_i, -1, eta (1 - p_i)); zero-weight
/// rows are dropped. Weighted logistic loss over the result equals prior_loss
/// minus eta sum_i H(p_i).
AugmentedDataset augment_with_prior(const Dataset& ds, std::span<const double> prior, double eta);

struct PriorTrainResult {
  AdditiveModel model;
  std::vector<RoundStats> stats;
  /// prior_loss on the original rows after each round.
  std::vector<double> prior_loss;
};

/// Logistic boosting on the augmented rows. cfg.loss must be logistic.
PriorTrainResult train_with_prior(const Dataset& ds, std::span<const double> prior, const PriorConfig& prior_cfg,
                                  const BoostConfig& cfg, const Dataset* eval = nullptr);

} // namespace boostkit
