#include "boostkit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "boostkit/detail/convex_search.hpp"
#include "boostkit/detail/numeric.hpp"
#include "boostkit/detail/text.hpp"
#include "boostkit/error.hpp"

namespace boostkit {

namespace {

constexpr double kFiniteDifferenceStep = 1e-4;
constexpr double kTaylorTolerance = 1e-5;
// |g(z) - e^{-z}| = |z|^3/6 + O(z^4) near zero; 0.2 bounds the ratio on |z| <= 0.1.
constexpr double kCubicRatioBound = 0.2;
constexpr double kMinimizerTolerance = 1e-6;
constexpr double kMinimizerSearchCap = 50.0;

double shifted_logistic(double z) {
  return detail::softplus(-2.0 * z) + 1.0 - std::numbers::ln2;
}

CheckLine make_line(std::string name, double measured, double expected, double tolerance) {
  return {std::move(name), measured, expected, tolerance, std::abs(measured - expected) <= tolerance};
}

} // namespace

std::string to_string(MarginLoss loss) {
  switch (loss) {
  case MarginLoss::exponential:
    return "exponential";
  case MarginLoss::logistic2:
    return "logistic2";
  case MarginLoss::logistic1:
    return "logistic1";
  }
  return "?";
}

std::string to_string(Link link) {
  return link == Link::sigmoid_2f ? "sigmoid_2f" : "sigmoid_f";
}

Link link_for(LossKind loss) noexcept {
  return loss == LossKind::exponential ? Link::sigmoid_2f : Link::sigmoid_f;
}

Link link_for(MarginLoss loss) noexcept {
  return loss == MarginLoss::logistic1 ? Link::sigmoid_f : Link::sigmoid_2f;
}

MarginLoss margin_loss_for(LossKind loss) noexcept {
  return loss == LossKind::exponential ? MarginLoss::exponential : MarginLoss::logistic1;
}

double margin_loss(MarginLoss loss, double z) noexcept {
  switch (loss) {
  case MarginLoss::exponential:
    return std::exp(-z);
  case MarginLoss::logistic2:
    return detail::softplus(-2.0 * z);
  case MarginLoss::logistic1:
    return detail::softplus(-z);
  }
  return 0.0;
}

double prob_positive(double f, Link link) {
  if (!std::isfinite(f)) {
    throw UsageError("prob_positive: score is not finite");
  }
  return detail::sigmoid(link == Link::sigmoid_2f ? 2.0 * f : f);
}

double prob_positive(double f, MarginLoss loss) {
  return prob_positive(f, link_for(loss));
}

double empirical_loss(std::span<const double> scores, const Dataset& ds, MarginLoss loss) {
  if (!ds.is_classification()) {
    throw DataError("empirical_loss requires a classification dataset");
  }
  if (scores.size() != ds.size()) {
    throw UsageError("empirical_loss: score count does not match dataset size");
  }
  const auto base = ds.base_weights();
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    total += base[i] * margin_loss(loss, ds.y(i) * scores[i]);
  }
  return total;
}

double empirical_loss(const AdditiveModel& model, const Dataset& ds, MarginLoss loss) {
  return empirical_loss(scores(model, ds), ds, loss);
}

bool CheckReport::passed() const noexcept {
  for (const auto& line : lines) {
    if (!line.passed) {
      return false;
    }
  }
  return !lines.empty();
}

void write_check_report(const CheckReport& report, std::ostream& out) {
  using detail::format_double;
  for (const auto& line : report.lines) {
    out << (line.passed ? "PASS " : "FAIL ") << line.name << " measured=" << format_double(line.measured)
        << " expected=" << format_double(line.expected)
        << " delta=" << format_double(std::abs(line.measured - line.expected))
        << " tol=" << format_double(line.tolerance) << '\n';
  }
}

CheckReport taylor_match_check(std::span<const double> grid) {
  const double h = kFiniteDifferenceStep;
  const auto first = [h](auto&& fn) { return (fn(h) - fn(-h)) / (2.0 * h); };
  const auto second = [h](auto&& fn) { return (fn(h) - 2.0 * fn(0.0) + fn(-h)) / (h * h); };
  const auto exponential = [](double z) { return std::exp(-z); };

  CheckReport report;
  report.lines.push_back(make_line("value_at_0.shifted_logistic", shifted_logistic(0.0), 1.0, kTaylorTolerance));
  report.lines.push_back(make_line("value_at_0.exponential", exponential(0.0), 1.0, kTaylorTolerance));
  report.lines.push_back(make_line("first_derivative_at_0.shifted_logistic", first(shifted_logistic), -1.0,
                                   kTaylorTolerance));
  report.lines.push_back(make_line("first_derivative_at_0.exponential", first(exponential), -1.0,
                                   kTaylorTolerance));
  report.lines.push_back(make_line("second_derivative_at_0.shifted_logistic", second(shifted_logistic), 1.0,
                                   kTaylorTolerance));
  report.lines.push_back(make_line("second_derivative_at_0.exponential", second(exponential), 1.0,
                                   kTaylorTolerance));

  double worst_ratio = 0.0;
  std::size_t used = 0;
  for (const double z : grid) {
    const double a = std::abs(z);
    if (a < 1e-2 || a > 0.1) {
      continue;
    }
    worst_ratio = std::max(worst_ratio, std::abs(shifted_logistic(z) - exponential(z)) / (a * a * a));
    ++used;
  }
  CheckLine cubic{"cubic_remainder_ratio_max", worst_ratio, 0.0, kCubicRatioBound,
                  used > 0 && worst_ratio <= kCubicRatioBound};
  report.lines.push_back(cubic);
  return report;
}

CheckReport upper_bound_check(std::span<const double> grid) {
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_z = 0.0;
  bool ok = !grid.empty();
  for (const double z : grid) {
    const double gap = std::exp(-z) - detail::softplus(-2.0 * z);
    if (gap < worst_gap) {
      worst_gap = gap;
      worst_z = z;
    }
    ok = ok && gap >= 0.0;
  }
  CheckReport report;
  report.lines.push_back({"min_gap_exp_minus_logistic2", worst_gap, 0.0, 0.0, ok});
  report.lines.push_back({"argmin_gap_z", worst_z, worst_z, 0.0, true});
  return report;
}

CheckReport common_minimizer_check(std::span<const double> probabilities) {
  CheckReport report;
  for (const double p : probabilities) {
    if (!(p > 0.0 && p < 1.0)) {
      throw UsageError("common_minimizer_check: p must lie strictly inside (0,1)");
    }
    const double expected = 0.5 * std::log(p / (1.0 - p));
    const auto exp_derivative = [p](double f) { return -p * std::exp(-f) + (1.0 - p) * std::exp(f); };
    const auto exp_curvature = [p](double f) { return p * std::exp(-f) + (1.0 - p) * std::exp(f); };
    const auto log_derivative = [p](double f) {
      return -2.0 * p * detail::sigmoid(-2.0 * f) + 2.0 * (1.0 - p) * detail::sigmoid(2.0 * f);
    };
    const auto log_curvature = [](double f) {
      const double s = detail::sigmoid(2.0 * f);
      return 4.0 * s * (1.0 - s);
    };
    const double exp_min =
        detail::minimize_convex(exp_derivative, exp_curvature, kMinimizerSearchCap, 1e-14).argmin;
    const double log_min =
        detail::minimize_convex(log_derivative, log_curvature, kMinimizerSearchCap, 1e-14).argmin;
    const std::string tag = "p=" + detail::format_double(p);
    report.lines.push_back(make_line("exponential_minimizer." + tag, exp_min, expected, kMinimizerTolerance));
    report.lines.push_back(make_line("logistic2_minimizer." + tag, log_min, expected, kMinimizerTolerance));
  }
  return report;
}

} // namespace boostkit
