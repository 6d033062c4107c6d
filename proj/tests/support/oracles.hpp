#pragma once

// Independent reference computations. These are written the slow, obvious
// way and share no code with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "boostkit/booster.hpp"
#include "boostkit/dataset.hpp"

namespace oracle {

using boostkit::AdditiveModel;
using boostkit::Dataset;

inline double score(const AdditiveModel& model, std::span<const double> x) {
  double f = 0.0;
  for (const auto& term : model.terms()) {
    const auto& s = term.stump;
    f += term.alpha * (x[s.feature] <= s.threshold ? s.left : s.right);
  }
  return f;
}

inline double weighted_error(const Dataset& ds, std::span<const double> w, std::size_t feature, double thr,
                             double left) {
  double err = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double h = ds.x(i)[feature] <= thr ? left : -left;
    if (h != ds.y(i)) {
      err += w[i];
    }
  }
  return err;
}

// Every threshold the candidate grid can produce: one below the minimum and
// every midpoint of consecutive distinct values.
inline std::vector<double> candidate_thresholds(const Dataset& ds, std::size_t feature) {
  std::vector<double> v;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    v.push_back(ds.x(i)[feature]);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> t{v.front() - 1.0};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    t.push_back(v[i] + (v[i + 1] - v[i]) / 2.0);
  }
  return t;
}

// Smallest weighted error over all features, grid thresholds and both orientations.
inline double best_binary_error(const Dataset& ds, std::span<const double> w) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < ds.dimension(); ++f) {
    for (double t : candidate_thresholds(ds, f)) {
      best = std::min({best, weighted_error(ds, w, f, t, -1.0), weighted_error(ds, w, f, t, 1.0)});
    }
  }
  return best;
}

// Smallest Z surrogate sum_side 2 sqrt((W+ + s)(W- + s)) over the grid.
inline double best_confidence_objective(const Dataset& ds, std::span<const double> w, double s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < ds.dimension(); ++f) {
    for (double t : candidate_thresholds(ds, f)) {
      double lp = 0, lm = 0, rp = 0, rm = 0;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const bool left = ds.x(i)[f] <= t;
        const bool pos = ds.y(i) > 0;
        (left ? (pos ? lp : lm) : (pos ? rp : rm)) += w[i];
      }
      best = std::min(best, 2.0 * std::sqrt((lp + s) * (lm + s)) + 2.0 * std::sqrt((rp + s) * (rm + s)));
    }
  }
  return best;
}

inline double mean_exp_loss(const AdditiveModel& model, const Dataset& ds) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    sum += std::exp(-ds.y(i) * score(model, ds.x(i)));
  }
  return sum / static_cast<double>(ds.size());
}

inline double train_error(const AdditiveModel& model, const Dataset& ds) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double h = score(model, ds.x(i)) >= 0.0 ? 1.0 : -1.0;
    wrong += h != ds.y(i);
  }
  return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

// sum_i b_i ln(1 + e^{-y_i f_i}), by the textbook two-branch formula.
inline double logistic_objective(std::span<const double> f, const Dataset& ds) {
  const auto b = ds.base_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double z = ds.y(i) * f[i];
    sum += b[i] * (z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)));
  }
  return sum;
}

// Empirical quantile of sorted values: midpoint when q n is an integer r,
// otherwise the ceil(q n)-th order statistic (1-based).
inline double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size());
  const double r = std::round(pos);
  if (std::abs(pos - r) < 1e-9 && r >= 1 && r < static_cast<double>(sorted.size())) {
    const auto k = static_cast<std::size_t>(r);
    return (sorted[k - 1] + sorted[k]) / 2.0;
  }
  return sorted[static_cast<std::size_t>(std::ceil(pos)) - 1];
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace oracle
