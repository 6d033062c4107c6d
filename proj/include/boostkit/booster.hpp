#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boostkit/dataset.hpp"
#include "boostkit/stump.hpp"

namespace boostkit {

/// Training loss. `logistic` is ln(1 + e^{-y f}).
enum class LossKind { exponential, logistic };

enum class AlphaStrategy {
  /// 1/2 ln((1 - eps)/eps); binary stumps only.
  closed_form_binary,
  /// Minimize the round's loss in alpha numerically.
  line_search,
  /// alpha = 1; confidence-rated outputs already carry the scale.
  unit,
};

std::string to_string(LossKind loss);
std::string to_string(AlphaStrategy strategy);
std::string to_string(StumpMode mode);

/// |alpha| * max|h| never exceeds this, so exp(-alpha y h) stays finite.
inline constexpr double kAlphaCap = 35.0;

/// Line-search stopping rule on the derivative of the normalized objective.
inline constexpr double kLineSearchTolerance = 1e-10;

struct BoostConfig {
  std::size_t rounds = 100;
  LossKind loss = LossKind::exponential;
  StumpSearchConfig stump;
  /// Unset: closed form for exponential loss with binary stumps, line search otherwise.
  std::optional<AlphaStrategy> alpha;

  AlphaStrategy resolved_alpha() const;
  /// Throws UsageError on an inconsistent configuration.
  void validate() const;
};

struct Term {
  double alpha = 0.0;
  Stump stump;

  friend bool operator==(const Term&, const Term&) = default;
};

/// f(x) = sum_t alpha_t h_t(x), summed in term order; H(x) = sign f(x) with sign(0) = +1.
class AdditiveModel {
public:
  explicit AdditiveModel(LossKind loss = LossKind::exponential, std::vector<Term> terms = {})
      : loss_(loss), terms_(std::move(terms)) {}

  void add(const Term& term) { terms_.push_back(term); }

  double score(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return score(x) >= 0.0 ? 1 : -1; }

  LossKind loss() const noexcept { return loss_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  double total_alpha() const noexcept;
  /// Smallest input dimension the model can be evaluated on.
  std::size_t required_dimension() const noexcept;

  friend bool operator==(const AdditiveModel&, const AdditiveModel&) = default;

private:
  LossKind loss_;
  std::vector<Term> terms_;
};

std::vector<double> scores(const AdditiveModel& model, const Dataset& ds);

/// Fraction of rows (weighted by base weights) where H(x) != y.
double error_rate(const AdditiveModel& model, const Dataset& ds);
double error_rate(std::span<const double> scores, const Dataset& ds);

struct RoundStats {
  std::size_t round = 0;
  double alpha = 0.0;
  /// Weighted error of sign(h_t) under D_t.
  double epsilon = 0.0;
  double gamma = 0.0;
  /// Normalizer Z_t. For logistic runs, the ratio of successive
  /// exponential-loss values (reporting only).
  double z = 1.0;
  double prod_z = 1.0;
  /// exp(-2 sum gamma^2) up to this round.
  double exp_bound = 1.0;
  double train_error = 0.0;
  std::optional<double> test_error;
  /// Alpha was clamped (epsilon floor or kAlphaCap) or zeroed for an
  /// all-zero base classifier.
  bool alpha_adjusted = false;
};

double alpha_binary(double epsilon, double smoothing = 0.0);

double z_value(std::span<const double> weights, std::span<const double> outputs,
               std::span<const double> labels, double alpha);

/// Minimizer of alpha -> Z(alpha); capped at kAlphaCap / max|h| when every
/// y h has one sign. Throws UsageError("uninformative base classifier")
/// when h vanishes wherever the weights are positive.
double alpha_line_search(std::span<const double> weights, std::span<const double> outputs,
                         std::span<const double> labels);

/// Minimizer of alpha -> sum_i b_i ln(1 + exp(-y_i (f_i + alpha h_i))).
double logistic_alpha_line_search(std::span<const double> base_weights, std::span<const double> scores,
                                  std::span<const double> outputs, std::span<const double> labels);

struct DistributionUpdate {
  WeightDistribution weights;
  double z;
};

/// D'(i) = D(i) exp(-alpha y_i h_i) / Z.
DistributionUpdate update_distribution(const WeightDistribution& weights, std::span<const double> outputs,
                                       std::span<const double> labels, double alpha);

/// D(i) proportional to b_i exp(-y_i f(x_i)).
WeightDistribution exponential_weights(const AdditiveModel& model, const Dataset& ds);
WeightDistribution exponential_weights(std::span<const double> scores, const Dataset& ds);

/// D(i) proportional to b_i / (1 + exp(y_i f(x_i))).
WeightDistribution logistic_weights(const AdditiveModel& model, const Dataset& ds);
WeightDistribution logistic_weights(std::span<const double> scores, const Dataset& ds);

/// Per-round view handed to a training observer.
struct RoundTrace {
  const RoundStats& stats;
  /// Model after this round's term was added.
  const AdditiveModel& model;
  /// Distribution the base learner was fit on.
  const WeightDistribution& weights;
  /// h_t(x_i) on the training rows.
  std::span<const double> outputs;
  /// Training scores f_t(x_i).
  std::span<const double> scores;
  /// D_{t+1} from the multiplicative update; exponential runs only.
  const WeightDistribution* next_weights;
};

using RoundObserver = std::function<void(const RoundTrace&)>;

struct TrainResult {
  AdditiveModel model;
  std::vector<RoundStats> stats;
};

/// Runs exactly cfg.rounds rounds of boosting.
TrainResult train(const Dataset& ds, const BoostConfig& cfg, const Dataset* eval = nullptr,
                  const RoundObserver& observer = {});

/// Recomputes per-round statistics of an exponential-loss model on `ds`:
/// D_t from f_{t-1} by the exponential weight rule, then epsilon_t, gamma_t
/// and Z_t of the stored alpha_t and h_t.
std::vector<RoundStats> replay_stats(const AdditiveModel& model, const Dataset& ds);

/// Writes round,epsilon,gamma,z,prod_z,exp_bound,train_error,test_error.
void write_stats_csv(std::span<const RoundStats> stats, std::ostream& out);

struct BoundRow {
  std::size_t round = 0;
  double train_error = 0.0;
  double prod_z = 1.0;
  double prod_sqrt = 1.0;
  double exp_bound = 1.0;
  bool holds = true;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  bool holds = true;
};

/// Relative slack allowed in each link of the bound chain.
inline constexpr double kBoundSlack = 1e-12;

/// Checks train_error <= prod Z_t <= exp(-2 sum gamma_t^2) round by round.
BoundReport bound_report(std::span<const RoundStats> stats);
void write_bound_report(const BoundReport& report, std::ostream& out);

/// y_i f(x_i) / sum_t |alpha_t|.
std::vector<double> margins(const AdditiveModel& model, const Dataset& ds);

} // namespace boostkit
