#include "boostkit/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

#include "boostkit/detail/numeric.hpp"
#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

namespace {

double x_log_ratio(double a, double b) {
  return a == 0.0 ? 0.0 : a * std::log(a / b);
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DataError(what + " must lie in [0,1]");
  }
}

void check_prior(const Dataset& ds, std::span<const double> prior) {
  if (prior.size() != ds.size()) {
    throw DataError("prior has " + std::to_string(prior.size()) + " entries for " +
                    std::to_string(ds.size()) + " rows");
  }
  for (const double p : prior) {
    check_probability(p, "prior");
  }
}

} // namespace

PriorRule::PriorRule(std::vector<PriorClause> clauses, double default_probability)
    : clauses_(std::move(clauses)), default_(default_probability) {
  check_probability(default_, "default prior probability");
  for (const auto& clause : clauses_) {
    check_probability(clause.probability, "prior rule probability");
    if (!std::isfinite(clause.threshold)) {
      throw DataError("prior rule threshold must be finite");
    }
  }
}

double PriorRule::evaluate(std::span<const double> x) const {
  for (const auto& clause : clauses_) {
    if (clause.feature >= x.size()) {
      throw DataError("prior rule uses feature " + std::to_string(clause.feature) + " but data has " +
                      std::to_string(x.size()) + " features");
    }
  }
  for (const auto& clause : clauses_) {
    const bool below = x[clause.feature] <= clause.threshold;
    if (below == (clause.comparator == Comparator::less_equal)) {
      return clause.probability;
    }
  }
  return default_;
}

std::vector<double> PriorRule::evaluate(const FeatureMatrix& features) const {
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out[i] = evaluate(features.row(i));
  }
  return out;
}

PriorRule PriorRule::parse(std::istream& in, const std::string& source) {
  std::vector<PriorClause> clauses;
  std::optional<double> fallback;
  std::string line;
  std::size_t line_number = 0;
  const auto fail = [&](const std::string& why) {
    return DataError(source + ": line " + std::to_string(line_number) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    if (fallback) {
      throw fail("rule after the default line");
    }
    const auto fields = detail::split_fields(text, ',');
    if (fields.size() == 2 && detail::trim(fields[0]) == "default") {
      const auto p = detail::parse_finite(fields[1]);
      if (!p) {
        throw fail("cannot parse default probability");
      }
      fallback = *p;
      continue;
    }
    if (fields.size() != 4) {
      throw fail("expected 'feature_index, <=|>, threshold, probability'");
    }
    const auto feature = detail::parse_integer(fields[0]);
    const auto comparator = detail::trim(fields[1]);
    const auto threshold = detail::parse_finite(fields[2]);
    const auto probability = detail::parse_finite(fields[3]);
    if (!feature || *feature < 0) {
      throw fail("bad feature index");
    }
    if (comparator != "<=" && comparator != ">") {
      throw fail("comparator must be <= or >");
    }
    if (!threshold || !probability) {
      throw fail("cannot parse threshold or probability");
    }
    clauses.push_back({static_cast<std::size_t>(*feature),
                       comparator == "<=" ? Comparator::less_equal : Comparator::greater, *threshold,
                       *probability});
  }
  if (!fallback) {
    throw DataError(source + ": missing final 'default, <probability>' line");
  }
  return PriorRule(std::move(clauses), *fallback);
}

PriorRule PriorRule::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  return parse(in, path.string());
}

void PriorConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw UsageError("eta must be a finite nonnegative number");
  }
  if (!(epsilon_clip > 0.0 && epsilon_clip < 0.5)) {
    throw UsageError("epsilon_clip must lie in (0, 0.5)");
  }
}

double relative_entropy(double p, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw UsageError("relative_entropy: q must lie strictly inside (0,1)");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw UsageError("relative_entropy: p must lie in [0,1]");
  }
  if (p == q) {
    return 0.0;
  }
  return std::max(0.0, x_log_ratio(p, q) + x_log_ratio(1.0 - p, 1.0 - q));
}

double prior_loss(std::span<const double> scores, const Dataset& ds, std::span<const double> prior,
                  const PriorConfig& cfg) {
  cfg.validate();
  if (!ds.is_classification()) {
    throw DataError("prior_loss requires a classification dataset");
  }
  check_prior(ds, prior);
  if (scores.size() != ds.size()) {
    throw UsageError("prior_loss: score count does not match dataset size");
  }
  const auto base = ds.base_weights();
  double data_term = 0.0;
  double prior_term = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    data_term += base[i] * detail::softplus(-ds.y(i) * scores[i]);
    const double q = std::clamp(detail::sigmoid(scores[i]), cfg.epsilon_clip, 1.0 - cfg.epsilon_clip);
    prior_term += relative_entropy(prior[i], q);
  }
  return data_term + cfg.eta * prior_term;
}

double prior_loss(const AdditiveModel& model, const Dataset& ds, std::span<const double> prior,
                  const PriorConfig& cfg) {
  return prior_loss(scores(model, ds), ds, prior, cfg);
}

double prior_loss(const AdditiveModel& model, const Dataset& ds, const PriorConfig& cfg) {
  if (!ds.prior()) {
    throw DataError("missing prior: dataset has no prior column");
  }
  return prior_loss(model, ds, *ds.prior(), cfg);
}

AugmentedDataset augment_with_prior(const Dataset& ds, std::span<const double> prior, double eta) {
  if (!ds.is_classification()) {
    throw DataError("augment_with_prior requires a classification dataset");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw UsageError("eta must be a finite nonnegative number");
  }
  check_prior(ds, prior);
  const auto base = ds.base_weights();
  std::vector<std::size_t> rows;
  std::vector<double> labels;
  std::vector<double> weights;
  const auto add = [&](std::size_t i, double label, double weight) {
    if (weight > 0.0) {
      rows.push_back(i);
      labels.push_back(label);
      weights.push_back(weight);
    }
  };
  for (std::size_t i = 0; i < ds.size(); ++i) {
    add(i, ds.y(i), base[i]);
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    add(i, 1.0, eta * prior[i]);
    add(i, -1.0, eta * (1.0 - prior[i]));
  }
  std::vector<double> values;
  values.reserve(rows.size() * ds.dimension());
  for (const auto i : rows) {
    const auto x = ds.x(i);
    values.insert(values.end(), x.begin(), x.end());
  }
  FeatureMatrix features(rows.size(), ds.dimension(), std::move(values), ds.features().names());
  return {Dataset(std::move(features), std::move(labels), std::nullopt, std::move(weights)), std::move(rows)};
}

PriorTrainResult train_with_prior(const Dataset& ds, std::span<const double> prior, const PriorConfig& prior_cfg,
                                  const BoostConfig& cfg, const Dataset* eval) {
  prior_cfg.validate();
  if (cfg.loss != LossKind::logistic) {
    throw UsageError("prior-knowledge boosting uses logistic loss");
  }
  const auto augmented = augment_with_prior(ds, prior, prior_cfg.eta);
  PriorTrainResult result;
  std::vector<double> original_scores(ds.size(), 0.0);
  const auto observer = [&](const RoundTrace& trace) {
    const auto& term = trace.model.terms().back();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      original_scores[i] += term.alpha * term.stump.evaluate_unchecked(ds.x(i));
    }
    result.prior_loss.push_back(prior_loss(original_scores, ds, prior, prior_cfg));
  };
  auto trained = train(augmented.data, cfg, eval, observer);
  result.model = std::move(trained.model);
  result.stats = std::move(trained.stats);
  return result;
}

} // namespace boostkit
