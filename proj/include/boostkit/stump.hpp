#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "boostkit/dataset.hpp"

namespace boostkit {

/// One-level decision rule: `left` when x[feature] <= threshold, else `right`.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  double left = -1.0;
  double right = 1.0;

  /// Throws UsageError when the feature index is outside x.
  double evaluate(std::span<const double> x) const;
  double evaluate_unchecked(std::span<const double> x) const noexcept {
    return x[feature] <= threshold ? left : right;
  }
  bool is_binary() const noexcept;

  friend bool operator==(const Stump&, const Stump&) = default;
};

enum class StumpMode { binary, confidence_rated };

struct StumpSearchConfig {
  StumpMode mode = StumpMode::binary;
  /// Additive smoothing of the per-side label masses; unset means 1/(2m).
  std::optional<double> smoothing;

  double smoothing_for(std::size_t m) const;
};

/// Largest magnitude a confidence-rated output may take (reached only with zero smoothing).
inline constexpr double kMaxConfidenceOutput = 35.0;

/// Candidate objectives closer than this are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

/// Per-feature row orders sorted by value (ties by row index). Built once per
/// training run and reused by every round's search.
class SortedColumns {
public:
  explicit SortedColumns(const FeatureMatrix& features);
  std::span<const std::uint32_t> order(std::size_t feature) const noexcept { return orders_[feature]; }
  std::size_t features() const noexcept { return orders_.size(); }

private:
  std::vector<std::vector<std::uint32_t>> orders_;
};

struct BinaryStumpFit {
  Stump stump;
  /// Weighted error, recomputed directly over the rows for the chosen stump.
  double epsilon = 0.0;
};

/// Minimum weighted-error +/-1 stump over all features, thresholds and both
/// orientations. Thresholds are midpoints between consecutive distinct
/// values plus one below the minimum. Ties: lowest feature, then lowest
/// threshold, then left <= right.
BinaryStumpFit best_binary_stump(const Dataset& ds, const WeightDistribution& weights);
BinaryStumpFit best_binary_stump(const Dataset& ds, const SortedColumns& columns,
                                 std::span<const double> weights);

/// Side output 1/2 ln((W+ + s)/(W- + s)), clipped to +/-kMaxConfidenceOutput;
/// zero when both smoothed masses vanish.
double confidence_output(double positive_mass, double negative_mass, double smoothing);

/// Real-valued stump minimizing sum over sides of 2 sqrt((W+ + s)(W- + s)).
/// Ties: lowest feature, then lowest threshold.
Stump best_confidence_stump(const Dataset& ds, const WeightDistribution& weights, double smoothing);
Stump best_confidence_stump(const Dataset& ds, const SortedColumns& columns,
                            std::span<const double> weights, double smoothing);

/// h(x_i) for every row.
std::vector<double> stump_outputs(const Stump& stump, const Dataset& ds);

/// Weighted mass of rows where the sign of h (sign(0) = +1) disagrees with y.
double weighted_error(std::span<const double> outputs, std::span<const double> labels,
                      std::span<const double> weights);

} // namespace boostkit
