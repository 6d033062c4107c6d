#include "boostkit/booster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "boostkit/detail/convex_search.hpp"
#include "boostkit/detail/numeric.hpp"
#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

namespace {

void require_classification(const Dataset& ds, const char* what) {
  if (!ds.is_classification()) {
    throw DataError(std::string(what) + " requires a classification dataset (labels in {-1,+1})");
  }
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw UsageError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

double max_magnitude(std::span<const double> values) {
  double out = 0.0;
  for (const double v : values) {
    out = std::max(out, std::abs(v));
  }
  return out;
}

// Throws when h is zero on every row that carries weight.
void require_informative(std::span<const double> weights, std::span<const double> outputs) {
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (weights[i] > 0.0 && outputs[i] != 0.0) {
      return;
    }
  }
  throw UsageError("uninformative base classifier");
}

bool is_informative(std::span<const double> weights, std::span<const double> outputs) {
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (weights[i] > 0.0 && outputs[i] != 0.0) {
      return true;
    }
  }
  return false;
}

// ln sum_i b_i exp(-y_i f_i)
double log_exponential_loss(std::span<const double> base, std::span<const double> scores,
                            std::span<const double> labels) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (base[i] > 0.0) {
      shift = std::max(shift, -labels[i] * scores[i]);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (base[i] > 0.0) {
      total += base[i] * std::exp(-labels[i] * scores[i] - shift);
    }
  }
  return shift + std::log(total);
}

double logistic_objective(std::span<const double> base, std::span<const double> scores,
                          std::span<const double> outputs, std::span<const double> labels, double alpha) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    total += base[i] * detail::softplus(-labels[i] * (scores[i] + alpha * outputs[i]));
  }
  return total;
}

struct AlphaChoice {
  double alpha = 0.0;
  bool adjusted = false;
};

AlphaChoice binary_alpha_choice(double epsilon, double smoothing) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw UsageError("epsilon must lie in [0,1]");
  }
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw UsageError("smoothing must be a finite nonnegative number");
  }
  const double floor = smoothing / (1.0 + 2.0 * smoothing);
  const double clamped = std::clamp(epsilon, floor, 1.0 - floor);
  bool adjusted = clamped != epsilon;
  double alpha = 0.0;
  if (clamped <= 0.0) {
    alpha = kAlphaCap;
    adjusted = true;
  } else if (clamped >= 1.0) {
    alpha = -kAlphaCap;
    adjusted = true;
  } else {
    alpha = 0.5 * std::log((1.0 - clamped) / clamped);
    if (std::abs(alpha) > kAlphaCap) {
      alpha = std::copysign(kAlphaCap, alpha);
      adjusted = true;
    }
  }
  return {alpha, adjusted};
}

double normalized_error(std::span<const double> scores, const Dataset& ds, std::span<const double> base) {
  double wrong = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
    if (predicted != ds.y(i)) {
      wrong += base[i];
    }
    total += base[i];
  }
  return wrong / total;
}

} // namespace

std::string to_string(LossKind loss) {
  return loss == LossKind::exponential ? "exponential" : "logistic";
}

std::string to_string(AlphaStrategy strategy) {
  switch (strategy) {
  case AlphaStrategy::closed_form_binary:
    return "closed_form_binary";
  case AlphaStrategy::line_search:
    return "line_search";
  case AlphaStrategy::unit:
    return "unit";
  }
  return "?";
}

std::string to_string(StumpMode mode) {
  return mode == StumpMode::binary ? "binary" : "confidence_rated";
}

AlphaStrategy BoostConfig::resolved_alpha() const {
  if (alpha) {
    return *alpha;
  }
  if (loss == LossKind::exponential && stump.mode == StumpMode::binary) {
    return AlphaStrategy::closed_form_binary;
  }
  return AlphaStrategy::line_search;
}

void BoostConfig::validate() const {
  if (rounds < 1) {
    throw UsageError("rounds must be at least 1");
  }
  if (resolved_alpha() == AlphaStrategy::closed_form_binary && stump.mode != StumpMode::binary) {
    throw UsageError("closed-form alpha requires binary stumps");
  }
  if (stump.smoothing && (!(*stump.smoothing >= 0.0) || !std::isfinite(*stump.smoothing))) {
    throw UsageError("smoothing must be a finite nonnegative number");
  }
}

double AdditiveModel::score(std::span<const double> x) const {
  double f = 0.0;
  for (const auto& term : terms_) {
    f += term.alpha * term.stump.evaluate(x);
  }
  return f;
}

double AdditiveModel::total_alpha() const noexcept {
  double total = 0.0;
  for (const auto& term : terms_) {
    total += std::abs(term.alpha);
  }
  return total;
}

std::size_t AdditiveModel::required_dimension() const noexcept {
  std::size_t d = 0;
  for (const auto& term : terms_) {
    d = std::max(d, term.stump.feature + 1);
  }
  return d;
}

std::vector<double> scores(const AdditiveModel& model, const Dataset& ds) {
  if (model.required_dimension() > ds.dimension()) {
    throw DataError("model needs " + std::to_string(model.required_dimension()) +
                    " features, data has " + std::to_string(ds.dimension()));
  }
  std::vector<double> f(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    f[i] = model.score(ds.x(i));
  }
  return f;
}

double error_rate(std::span<const double> scores, const Dataset& ds) {
  require_classification(ds, "error_rate");
  require_same_length(scores.size(), ds.size(), "error_rate");
  return normalized_error(scores, ds, ds.base_weights());
}

double error_rate(const AdditiveModel& model, const Dataset& ds) {
  return error_rate(scores(model, ds), ds);
}

double alpha_binary(double epsilon, double smoothing) {
  return binary_alpha_choice(epsilon, smoothing).alpha;
}

double z_value(std::span<const double> weights, std::span<const double> outputs,
               std::span<const double> labels, double alpha) {
  require_same_length(weights.size(), outputs.size(), "z_value");
  require_same_length(weights.size(), labels.size(), "z_value");
  double z = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    z += weights[i] * std::exp(-alpha * labels[i] * outputs[i]);
  }
  return z;
}

double alpha_line_search(std::span<const double> weights, std::span<const double> outputs,
                         std::span<const double> labels) {
  require_same_length(weights.size(), outputs.size(), "alpha_line_search");
  require_same_length(weights.size(), labels.size(), "alpha_line_search");
  require_informative(weights, outputs);
  const double cap = kAlphaCap / max_magnitude(outputs);
  const auto derivative = [&](double alpha) {
    double g = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double u = labels[i] * outputs[i];
      g -= weights[i] * u * std::exp(-alpha * u);
    }
    return g;
  };
  const auto curvature = [&](double alpha) {
    double c = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double u = labels[i] * outputs[i];
      c += weights[i] * u * u * std::exp(-alpha * u);
    }
    return c;
  };
  return detail::minimize_convex(derivative, curvature, cap, kLineSearchTolerance).argmin;
}

double logistic_alpha_line_search(std::span<const double> base_weights, std::span<const double> scores,
                                  std::span<const double> outputs, std::span<const double> labels) {
  const std::size_t m = outputs.size();
  require_same_length(base_weights.size(), m, "logistic_alpha_line_search");
  require_same_length(scores.size(), m, "logistic_alpha_line_search");
  require_same_length(labels.size(), m, "logistic_alpha_line_search");
  require_informative(base_weights, outputs);
  double total = 0.0;
  for (const double b : base_weights) {
    total += b;
  }
  const double cap = kAlphaCap / max_magnitude(outputs);
  const auto derivative = [&](double alpha) {
    double g = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double u = labels[i] * outputs[i];
      const double margin = labels[i] * scores[i] + alpha * u;
      g -= base_weights[i] * u * detail::sigmoid(-margin);
    }
    return g / total;
  };
  const auto curvature = [&](double alpha) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double u = labels[i] * outputs[i];
      const double margin = labels[i] * scores[i] + alpha * u;
      c += base_weights[i] * u * u * detail::sigmoid(margin) * detail::sigmoid(-margin);
    }
    return c / total;
  };
  const double alpha = detail::minimize_convex(derivative, curvature, cap, kLineSearchTolerance).argmin;
  // Alpha = 0 is always admissible; never accept a step that rounding made worse.
  if (logistic_objective(base_weights, scores, outputs, labels, alpha) >
      logistic_objective(base_weights, scores, outputs, labels, 0.0)) {
    return 0.0;
  }
  return alpha;
}

DistributionUpdate update_distribution(const WeightDistribution& weights, std::span<const double> outputs,
                                       std::span<const double> labels, double alpha) {
  require_same_length(weights.size(), outputs.size(), "update_distribution");
  require_same_length(weights.size(), labels.size(), "update_distribution");
  std::vector<double> next(weights.size());
  double z = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    next[i] = weights[i] * std::exp(-alpha * labels[i] * outputs[i]);
    z += next[i];
  }
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw InvariantError("distribution update normalizer is " + detail::format_double(z));
  }
  for (double& w : next) {
    w /= z;
  }
  return {WeightDistribution(std::move(next)), z};
}

WeightDistribution exponential_weights(std::span<const double> scores, const Dataset& ds) {
  require_classification(ds, "exponential_weights");
  require_same_length(scores.size(), ds.size(), "exponential_weights");
  const auto base = ds.base_weights();
  // Shift by the largest exponent so the largest term is exp(0).
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (base[i] > 0.0) {
      shift = std::max(shift, -ds.y(i) * scores[i]);
    }
  }
  std::vector<double> w(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    w[i] = base[i] > 0.0 ? base[i] * std::exp(-ds.y(i) * scores[i] - shift) : 0.0;
  }
  return WeightDistribution::normalize(std::move(w));
}

WeightDistribution exponential_weights(const AdditiveModel& model, const Dataset& ds) {
  return exponential_weights(scores(model, ds), ds);
}

WeightDistribution logistic_weights(std::span<const double> scores, const Dataset& ds) {
  require_classification(ds, "logistic_weights");
  require_same_length(scores.size(), ds.size(), "logistic_weights");
  const auto base = ds.base_weights();
  // log sigma(-z) = -softplus(z); shifted by the largest log weight so that
  // very confident models do not underflow every weight to zero.
  std::vector<double> w(ds.size());
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    w[i] = -detail::softplus(ds.y(i) * scores[i]);
    if (base[i] > 0.0) {
      shift = std::max(shift, w[i]);
    }
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    w[i] = base[i] > 0.0 ? base[i] * std::exp(w[i] - shift) : 0.0;
  }
  return WeightDistribution::normalize(std::move(w));
}

WeightDistribution logistic_weights(const AdditiveModel& model, const Dataset& ds) {
  return logistic_weights(scores(model, ds), ds);
}

TrainResult train(const Dataset& ds, const BoostConfig& cfg, const Dataset* eval,
                  const RoundObserver& observer) {
  cfg.validate();
  require_classification(ds, "train");
  if (eval) {
    require_classification(*eval, "evaluation");
    if (eval->dimension() != ds.dimension()) {
      throw DataError("evaluation data has " + std::to_string(eval->dimension()) +
                      " features, training data has " + std::to_string(ds.dimension()));
    }
  }
  const std::size_t m = ds.size();
  const auto base = ds.base_weights();
  const auto& labels = ds.labels();
  const double smoothing = cfg.stump.smoothing_for(m);
  const AlphaStrategy strategy = cfg.resolved_alpha();
  const SortedColumns columns(ds.features());

  TrainResult result{AdditiveModel(cfg.loss), {}};
  result.stats.reserve(cfg.rounds);
  std::vector<double> train_scores(m, 0.0);
  std::vector<double> eval_scores(eval ? eval->size() : 0, 0.0);
  WeightDistribution weights = WeightDistribution::normalize(base);
  double log_loss_prev = log_exponential_loss(base, train_scores, labels);
  double prod_z = 1.0;
  double sum_gamma_sq = 0.0;

  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    if (cfg.loss == LossKind::logistic) {
      weights = logistic_weights(train_scores, ds);
    }

    Stump stump;
    std::vector<double> outputs;
    double epsilon = 0.0;
    try {
      if (cfg.stump.mode == StumpMode::binary) {
        const auto fit = best_binary_stump(ds, columns, weights.values());
        stump = fit.stump;
        epsilon = fit.epsilon;
        outputs = stump_outputs(stump, ds);
      } else {
        stump = best_confidence_stump(ds, columns, weights.values(), smoothing);
        outputs = stump_outputs(stump, ds);
        epsilon = weighted_error(outputs, labels, weights.values());
      }
    } catch (const std::exception& e) {
      throw InvariantError("round " + std::to_string(round) + ": base learner failed: " + e.what());
    }

    AlphaChoice choice;
    switch (strategy) {
    case AlphaStrategy::closed_form_binary:
      choice = binary_alpha_choice(epsilon, smoothing);
      break;
    case AlphaStrategy::line_search:
      if (!is_informative(weights.values(), outputs)) {
        choice = {0.0, true};
      } else if (cfg.loss == LossKind::exponential) {
        choice.alpha = alpha_line_search(weights.values(), outputs, labels);
      } else {
        choice.alpha = logistic_alpha_line_search(base, train_scores, outputs, labels);
      }
      break;
    case AlphaStrategy::unit:
      choice.alpha = 1.0;
      if (max_magnitude(outputs) > kAlphaCap) {
        choice = {kAlphaCap / max_magnitude(outputs), true};
      }
      break;
    }
    const double alpha = choice.alpha;

    std::optional<WeightDistribution> next_weights;
    double z = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      train_scores[i] += alpha * outputs[i];
    }
    if (cfg.loss == LossKind::exponential) {
      auto update = update_distribution(weights, outputs, labels, alpha);
      z = update.z;
      next_weights.emplace(std::move(update.weights));
    } else {
      const double log_loss = log_exponential_loss(base, train_scores, labels);
      z = std::exp(log_loss - log_loss_prev);
      log_loss_prev = log_loss;
    }
    result.model.add({alpha, stump});
    if (eval) {
      for (std::size_t i = 0; i < eval->size(); ++i) {
        eval_scores[i] += alpha * stump.evaluate_unchecked(eval->x(i));
      }
    }

    const double gamma = 0.5 - epsilon;
    prod_z *= z;
    sum_gamma_sq += gamma * gamma;
    RoundStats stats;
    stats.round = round;
    stats.alpha = alpha;
    stats.epsilon = epsilon;
    stats.gamma = gamma;
    stats.z = z;
    stats.prod_z = prod_z;
    stats.exp_bound = std::exp(-2.0 * sum_gamma_sq);
    stats.train_error = normalized_error(train_scores, ds, base);
    if (eval) {
      stats.test_error = normalized_error(eval_scores, *eval, eval->base_weights());
    }
    stats.alpha_adjusted = choice.adjusted;
    result.stats.push_back(stats);

    if (observer) {
      observer(RoundTrace{result.stats.back(), result.model, weights, outputs, train_scores,
                          next_weights ? &*next_weights : nullptr});
    }
    if (next_weights) {
      weights = std::move(*next_weights);
    }
  }
  return result;
}

std::vector<RoundStats> replay_stats(const AdditiveModel& model, const Dataset& ds) {
  require_classification(ds, "replay_stats");
  if (model.required_dimension() > ds.dimension()) {
    throw DataError("model needs " + std::to_string(model.required_dimension()) + " features, data has " +
                    std::to_string(ds.dimension()));
  }
  const auto base = ds.base_weights();
  std::vector<double> f(ds.size(), 0.0);
  std::vector<RoundStats> out;
  double prod_z = 1.0;
  double sum_gamma_sq = 0.0;
  std::size_t round = 0;
  for (const auto& term : model.terms()) {
    const auto weights = exponential_weights(f, ds);
    const auto outputs = stump_outputs(term.stump, ds);
    RoundStats s;
    s.round = ++round;
    s.alpha = term.alpha;
    s.epsilon = weighted_error(outputs, ds.labels(), weights.values());
    s.gamma = 0.5 - s.epsilon;
    s.z = z_value(weights.values(), outputs, ds.labels(), term.alpha);
    prod_z *= s.z;
    sum_gamma_sq += s.gamma * s.gamma;
    s.prod_z = prod_z;
    s.exp_bound = std::exp(-2.0 * sum_gamma_sq);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      f[i] += term.alpha * outputs[i];
    }
    s.train_error = normalized_error(f, ds, base);
    out.push_back(s);
  }
  return out;
}

void write_stats_csv(std::span<const RoundStats> stats, std::ostream& out) {
  using detail::format_double;
  out << "round,epsilon,gamma,z,prod_z,exp_bound,train_error,test_error\n";
  for (const auto& s : stats) {
    out << s.round << ',' << format_double(s.epsilon) << ',' << format_double(s.gamma) << ','
        << format_double(s.z) << ',' << format_double(s.prod_z) << ',' << format_double(s.exp_bound)
        << ',' << format_double(s.train_error) << ',';
    if (s.test_error) {
      out << format_double(*s.test_error);
    }
    out << '\n';
  }
}

BoundReport bound_report(std::span<const RoundStats> stats) {
  BoundReport report;
  double prod_sqrt = 1.0;
  for (const auto& s : stats) {
    prod_sqrt *= std::sqrt(std::max(0.0, 1.0 - 4.0 * s.gamma * s.gamma));
    BoundRow row;
    row.round = s.round;
    row.train_error = s.train_error;
    row.prod_z = s.prod_z;
    row.prod_sqrt = prod_sqrt;
    row.exp_bound = s.exp_bound;
    row.holds = row.train_error <= row.prod_z * (1.0 + kBoundSlack) &&
                row.prod_z <= row.exp_bound * (1.0 + kBoundSlack);
    report.holds = report.holds && row.holds;
    report.rows.push_back(row);
  }
  return report;
}

void write_bound_report(const BoundReport& report, std::ostream& out) {
  using detail::format_double;
  out << "round,train_error,prod_z,prod_sqrt_1_minus_4gamma2,exp_bound,chain\n";
  for (const auto& row : report.rows) {
    out << row.round << ',' << format_double(row.train_error) << ',' << format_double(row.prod_z) << ','
        << format_double(row.prod_sqrt) << ',' << format_double(row.exp_bound) << ','
        << (row.holds ? "ok" : "VIOLATED") << '\n';
  }
  out << "bound chain train_error <= prod_z <= exp_bound: " << (report.holds ? "holds" : "VIOLATED") << '\n';
}

std::vector<double> margins(const AdditiveModel& model, const Dataset& ds) {
  require_classification(ds, "margins");
  const double total = model.total_alpha();
  if (!(total > 0.0)) {
    throw UsageError("margins undefined: total |alpha| is zero");
  }
  auto f = scores(model, ds);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = ds.y(i) * f[i] / total;
  }
  return f;
}

} // namespace boostkit
