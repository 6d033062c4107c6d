#include "boostkit/stump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "boostkit/error.hpp"

namespace boostkit {

namespace {

void require_classification(const Dataset& ds) {
  if (!ds.is_classification()) {
    throw DataError("stump search requires a classification dataset (labels in {-1,+1})");
  }
}

// Strictly between neighbours in the <= partition sense: lo <= t < hi.
double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

double below(double lowest) {
  const double t = lowest - 1.0;
  return t < lowest ? t : std::nextafter(lowest, -std::numeric_limits<double>::infinity());
}

// Walks the candidate partitions of one feature in ascending threshold order.
// `visit(threshold, pos_left, neg_left)` receives the weighted label masses
// left of the threshold.
template <typename Visit>
void sweep_feature(const Dataset& ds, std::span<const std::uint32_t> order, std::size_t feature,
                   std::span<const double> weights, Visit&& visit) {
  const auto value = [&](std::size_t k) { return ds.x(order[k])[feature]; };
  visit(below(value(0)), 0.0, 0.0);
  double pos_left = 0.0;
  double neg_left = 0.0;
  const std::size_t m = order.size();
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = order[k];
    if (ds.y(i) > 0.0) {
      pos_left += weights[i];
    } else {
      neg_left += weights[i];
    }
    if (k + 1 < m && value(k + 1) != value(k)) {
      visit(midpoint(value(k), value(k + 1)), pos_left, neg_left);
    }
  }
}

struct LabelMass {
  double positive = 0.0;
  double negative = 0.0;
};

LabelMass total_mass(const Dataset& ds, std::span<const double> weights) {
  LabelMass total;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.y(i) > 0.0 ? total.positive : total.negative) += weights[i];
  }
  return total;
}

void check_weights(const Dataset& ds, const SortedColumns& columns, std::span<const double> weights) {
  if (weights.size() != ds.size()) {
    throw UsageError("weight vector length " + std::to_string(weights.size()) +
                     " does not match dataset size " + std::to_string(ds.size()));
  }
  if (columns.features() != ds.dimension()) {
    throw UsageError("sorted column index built for a different dataset");
  }
}

} // namespace

double Stump::evaluate(std::span<const double> x) const {
  if (feature >= x.size()) {
    throw UsageError("stump feature index " + std::to_string(feature) +
                     " out of range for dimension " + std::to_string(x.size()));
  }
  return evaluate_unchecked(x);
}

bool Stump::is_binary() const noexcept {
  const auto unit = [](double v) { return v == 1.0 || v == -1.0; };
  return unit(left) && unit(right);
}

double StumpSearchConfig::smoothing_for(std::size_t m) const {
  if (smoothing) {
    if (!(*smoothing >= 0.0) || !std::isfinite(*smoothing)) {
      throw UsageError("smoothing must be a finite nonnegative number");
    }
    return *smoothing;
  }
  return 1.0 / (2.0 * static_cast<double>(m));
}

SortedColumns::SortedColumns(const FeatureMatrix& features) {
  const std::size_t m = features.rows();
  orders_.resize(features.cols());
  for (std::size_t j = 0; j < features.cols(); ++j) {
    auto& order = orders_[j];
    order.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      order[i] = static_cast<std::uint32_t>(i);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double va = features(a, j);
      const double vb = features(b, j);
      return va < vb || (va == vb && a < b);
    });
  }
}

BinaryStumpFit best_binary_stump(const Dataset& ds, const WeightDistribution& weights) {
  require_classification(ds);
  return best_binary_stump(ds, SortedColumns(ds.features()), weights.values());
}

BinaryStumpFit best_binary_stump(const Dataset& ds, const SortedColumns& columns,
                                 std::span<const double> weights) {
  require_classification(ds);
  check_weights(ds, columns, weights);
  const LabelMass total = total_mass(ds, weights);

  Stump best;
  double best_error = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < ds.dimension(); ++f) {
    sweep_feature(ds, columns.order(f), f, weights, [&](double threshold, double pos_left, double neg_left) {
      const double pos_right = total.positive - pos_left;
      const double neg_right = total.negative - neg_left;
      // Orientation (-1, +1) is listed first so it wins exact ties.
      const double rising = pos_left + neg_right;
      const double falling = neg_left + pos_right;
      if (rising < best_error - kTieTolerance) {
        best_error = rising;
        best = Stump{f, threshold, -1.0, 1.0};
      }
      if (falling < best_error - kTieTolerance) {
        best_error = falling;
        best = Stump{f, threshold, 1.0, -1.0};
      }
    });
  }
  const auto outputs = stump_outputs(best, ds);
  return {best, weighted_error(outputs, ds.labels(), weights)};
}

double confidence_output(double positive_mass, double negative_mass, double smoothing) {
  const double pos = positive_mass + smoothing;
  const double neg = negative_mass + smoothing;
  if (pos <= 0.0 && neg <= 0.0) {
    return 0.0;
  }
  const double raw = 0.5 * (std::log(pos) - std::log(neg));
  return std::clamp(raw, -kMaxConfidenceOutput, kMaxConfidenceOutput);
}

Stump best_confidence_stump(const Dataset& ds, const WeightDistribution& weights, double smoothing) {
  require_classification(ds);
  return best_confidence_stump(ds, SortedColumns(ds.features()), weights.values(), smoothing);
}

Stump best_confidence_stump(const Dataset& ds, const SortedColumns& columns,
                            std::span<const double> weights, double smoothing) {
  require_classification(ds);
  check_weights(ds, columns, weights);
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw UsageError("smoothing must be a finite nonnegative number");
  }
  const LabelMass total = total_mass(ds, weights);
  const auto side_z = [smoothing](double pos, double neg) {
    return 2.0 * std::sqrt((pos + smoothing) * (neg + smoothing));
  };

  Stump best;
  double best_z = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < ds.dimension(); ++f) {
    sweep_feature(ds, columns.order(f), f, weights, [&](double threshold, double pos_left, double neg_left) {
      // Subtraction can dip a hair below zero; sqrt must not see it.
      const double pos_right = std::max(0.0, total.positive - pos_left);
      const double neg_right = std::max(0.0, total.negative - neg_left);
      const double z = side_z(pos_left, neg_left) + side_z(pos_right, neg_right);
      if (z < best_z - kTieTolerance) {
        best_z = z;
        best.feature = f;
        best.threshold = threshold;
      }
    });
  }
  // Masses recomputed row by row so outputs do not depend on sweep order.
  LabelMass left;
  LabelMass right;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& side = ds.x(i)[best.feature] <= best.threshold ? left : right;
    (ds.y(i) > 0.0 ? side.positive : side.negative) += weights[i];
  }
  best.left = confidence_output(left.positive, left.negative, smoothing);
  best.right = confidence_output(right.positive, right.negative, smoothing);
  return best;
}

std::vector<double> stump_outputs(const Stump& stump, const Dataset& ds) {
  if (stump.feature >= ds.dimension()) {
    throw UsageError("stump feature index " + std::to_string(stump.feature) +
                     " out of range for dimension " + std::to_string(ds.dimension()));
  }
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out[i] = stump.evaluate_unchecked(ds.x(i));
  }
  return out;
}

double weighted_error(std::span<const double> outputs, std::span<const double> labels,
                      std::span<const double> weights) {
  double error = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double predicted = outputs[i] >= 0.0 ? 1.0 : -1.0;
    if (predicted != labels[i]) {
      error += weights[i];
    }
  }
  return error;
}

} // namespace boostkit
