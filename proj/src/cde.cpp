#include "boostkit/cde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boostkit/error.hpp"

namespace boostkit {

namespace {

void check_dimension(const ConditionalDensityModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) {
    throw DataError("conditional density model expects " + std::to_string(model.dimension) +
                    " features, got " + std::to_string(x.size()));
  }
}

AdditiveModel constant_classifier(double probability) {
  const double score = std::log(probability / (1.0 - probability));
  return AdditiveModel(LossKind::logistic, {Term{1.0, Stump{0, 0.0, score, score}}});
}

} // namespace

Breakpoints choose_breakpoints(std::span<const double> labels, std::size_t k) {
  if (labels.empty()) {
    throw DataError("choose_breakpoints: no labels");
  }
  std::vector<double> sorted(labels.begin(), labels.end());
  for (const double y : sorted) {
    if (!std::isfinite(y)) {
      throw DataError("choose_breakpoints: non-finite label");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> unique_values = sorted;
  unique_values.erase(std::unique(unique_values.begin(), unique_values.end()), unique_values.end());
  if (unique_values.size() < 2) {
    throw DataError("degenerate label range: all labels equal");
  }
  if (k < 1 || k >= unique_values.size()) {
    throw UsageError("breakpoint count k must satisfy 1 <= k < " + std::to_string(unique_values.size()) +
                     " (number of distinct labels)");
  }

  const std::size_t n = sorted.size();
  Breakpoints bp;
  bp.support_lo = sorted.front();
  bp.support_hi = sorted.back();
  bp.requested = k;
  for (std::size_t j = 1; j <= k; ++j) {
    // Level j/(k+1); position j n/(k+1) in exact integer arithmetic.
    const std::size_t numerator = j * n;
    const std::size_t r = numerator / (k + 1);
    double b = 0.0;
    if (numerator % (k + 1) == 0) {
      const double lo = sorted[r - 1];
      const double hi = sorted[r];
      b = lo + (hi - lo) / 2.0;
    } else {
      b = sorted[r];
    }
    if (bp.values.empty() || b > bp.values.back()) {
      bp.values.push_back(b);
    }
  }
  return bp;
}

ConditionalDensityModel train_cde(const Dataset& ds, std::size_t k, const BoostConfig& cfg) {
  if (cfg.loss != LossKind::logistic) {
    throw UsageError("conditional density estimation trains logistic-loss classifiers");
  }
  cfg.validate();
  ConditionalDensityModel model;
  model.breakpoints = choose_breakpoints(ds.labels(), k);
  model.link = link_for(LossKind::logistic);
  model.dimension = ds.dimension();
  for (const double b : model.breakpoints.values) {
    std::vector<double> events(ds.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      events[i] = ds.y(i) >= b ? 1.0 : -1.0;
      positives += events[i] > 0.0 ? 1 : 0;
    }
    if (positives == 0 || positives == ds.size()) {
      const double p = positives == 0 ? kConstantProbabilityClip : 1.0 - kConstantProbabilityClip;
      model.classifiers.push_back(constant_classifier(p));
      model.constant.push_back(true);
      continue;
    }
    model.classifiers.push_back(train(ds.relabeled(std::move(events)), cfg).model);
    model.constant.push_back(false);
  }
  return model;
}

std::vector<double> exceedance_probabilities(const ConditionalDensityModel& model, std::span<const double> x) {
  check_dimension(model, x);
  std::vector<double> q;
  q.reserve(model.classifiers.size());
  for (const auto& classifier : model.classifiers) {
    q.push_back(prob_positive(classifier.score(x), model.link));
  }
  return q;
}

BinDistribution bin_distribution(std::span<const double> exceedance) {
  BinDistribution dist;
  dist.masses.reserve(exceedance.size() + 1);
  double previous = 1.0;
  for (const double q : exceedance) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw UsageError("exceedance probability outside [0,1]");
    }
    const double repaired = std::min(previous, q);
    dist.masses.push_back(previous - repaired);
    previous = repaired;
  }
  dist.masses.push_back(previous);
  double total = 0.0;
  for (const double m : dist.masses) {
    total += m;
  }
  for (double& m : dist.masses) {
    m /= total;
  }
  return dist;
}

BinDistribution conditional_distribution(const ConditionalDensityModel& model, std::span<const double> x) {
  return bin_distribution(exceedance_probabilities(model, x));
}

double sample(const Breakpoints& breakpoints, const BinDistribution& dist, Rng& rng) {
  if (dist.masses.size() != breakpoints.size() + 1) {
    throw UsageError("bin distribution does not match the breakpoints");
  }
  const double u = rng.uniform();
  const double v = rng.uniform();
  std::size_t chosen = dist.masses.size();
  double cumulative = 0.0;
  for (std::size_t j = 0; j < dist.masses.size(); ++j) {
    cumulative += dist.masses[j];
    if (dist.masses[j] > 0.0 && u < cumulative) {
      chosen = j;
      break;
    }
  }
  if (chosen == dist.masses.size()) {
    // u landed in the rounding gap above the final cumulative sum.
    for (std::size_t j = dist.masses.size(); j-- > 0;) {
      if (dist.masses[j] > 0.0) {
        chosen = j;
        break;
      }
    }
  }
  const double lo = breakpoints.bin_lo(chosen);
  const double hi = breakpoints.bin_hi(chosen);
  return lo + v * (hi - lo);
}

double sample(const ConditionalDensityModel& model, std::span<const double> x, Rng& rng) {
  return sample(model.breakpoints, conditional_distribution(model, x), rng);
}

double quantile(const Breakpoints& breakpoints, const BinDistribution& dist, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw UsageError("quantile level must lie strictly between 0 and 1");
  }
  if (dist.masses.size() != breakpoints.size() + 1) {
    throw UsageError("bin distribution does not match the breakpoints");
  }
  double below = 0.0;
  for (std::size_t j = 0; j < dist.masses.size(); ++j) {
    const double mass = dist.masses[j];
    if (mass > 0.0 && below + mass >= level) {
      const double lo = breakpoints.bin_lo(j);
      const double hi = breakpoints.bin_hi(j);
      const double fraction = std::clamp((level - below) / mass, 0.0, 1.0);
      return std::clamp(lo + fraction * (hi - lo), lo, hi);
    }
    below += mass;
  }
  return breakpoints.support_hi;
}

double quantile(const ConditionalDensityModel& model, std::span<const double> x, double level) {
  return quantile(model.breakpoints, conditional_distribution(model, x), level);
}

} // namespace boostkit
