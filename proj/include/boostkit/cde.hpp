#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "boostkit/booster.hpp"
#include "boostkit/losses.hpp"
#include "boostkit/rng.hpp"

namespace boostkit {

/// Strictly increasing label thresholds b_1 < ... < b_k inside [support_lo, support_hi].
struct Breakpoints {
  std::vector<double> values;
  double support_lo = 0.0;
  double support_hi = 0.0;
  /// k asked for; larger than values.size() when duplicate quantiles were merged.
  std::size_t requested = 0;

  std::size_t size() const noexcept { return values.size(); }
  /// [lo, hi) of bin j (the last bin is closed), j = 0..k.
  double bin_lo(std::size_t j) const noexcept { return j == 0 ? support_lo : values[j - 1]; }
  double bin_hi(std::size_t j) const noexcept { return j == values.size() ? support_hi : values[j]; }

  friend bool operator==(const Breakpoints&, const Breakpoints&) = default;
};

/// b_j = empirical quantile of the labels at level j/(k+1), duplicates removed.
///
/// Quantile at level q over sorted labels y_(1..n): when q n is an integer r,
/// the midpoint of y_(r) and y_(r+1); otherwise y_(ceil(q n)).
Breakpoints choose_breakpoints(std::span<const double> labels, std::size_t k);

/// Probability clip for classifiers whose breakpoint event is single-class.
inline constexpr double kConstantProbabilityClip = 1e-6;

struct ConditionalDensityModel {
  Breakpoints breakpoints;
  /// Classifier j scores the event y >= b_j; all use logistic loss.
  std::vector<AdditiveModel> classifiers;
  /// Set for classifiers trained on single-class events (constant output).
  std::vector<bool> constant;
  Link link = Link::sigmoid_f;

  std::size_t dimension = 0;

  friend bool operator==(const ConditionalDensityModel&, const ConditionalDensityModel&) = default;
};

/// Masses over the k+1 bins [lo, b_1), [b_1, b_2), ..., [b_k, hi].
struct BinDistribution {
  std::vector<double> masses;
};

/// Trains one logistic-loss booster per breakpoint. cfg.loss must be logistic.
ConditionalDensityModel train_cde(const Dataset& ds, std::size_t k, const BoostConfig& cfg);

/// Raw exceedance estimates q_j(x) = Pr[y >= b_j | x], before monotone repair.
std::vector<double> exceedance_probabilities(const ConditionalDensityModel& model, std::span<const double> x);

/// Running-minimum repair q~_j = min(q~_{j-1}, q_j), q~_0 = 1, q~_{k+1} = 0;
/// mass_j = q~_{j-1} - q~_j, renormalized.
BinDistribution bin_distribution(std::span<const double> exceedance);

BinDistribution conditional_distribution(const ConditionalDensityModel& model, std::span<const double> x);

/// Bin chosen by inverse CDF on one uniform draw, then a uniform point inside it.
double sample(const Breakpoints& breakpoints, const BinDistribution& dist, Rng& rng);
double sample(const ConditionalDensityModel& model, std::span<const double> x, Rng& rng);

/// Inverse of the piecewise-linear CDF (uniform density inside each bin).
/// Throws UsageError unless 0 < level < 1.
double quantile(const Breakpoints& breakpoints, const BinDistribution& dist, double level);
double quantile(const ConditionalDensityModel& model, std::span<const double> x, double level);

} // namespace boostkit
