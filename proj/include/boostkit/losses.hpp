#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boostkit/booster.hpp"

namespace boostkit {

/// Margin losses of z = y f:
///   exponential  e^{-z}
///   logistic2    ln(1 + e^{-2z})
///   logistic1    ln(1 + e^{-z})
enum class MarginLoss { exponential, logistic2, logistic1 };

/// Probability link bound to the training loss.
///   sigmoid_2f: 1/(1 + e^{-2f}) = e^f / (e^f + e^{-f}); exponential / logistic2 training.
///   sigmoid_f:  1/(1 + e^{-f}); logistic1 training (LossKind::logistic).
enum class Link { sigmoid_2f, sigmoid_f };

std::string to_string(MarginLoss loss);
std::string to_string(Link link);

Link link_for(LossKind loss) noexcept;
Link link_for(MarginLoss loss) noexcept;
MarginLoss margin_loss_for(LossKind loss) noexcept;

double margin_loss(MarginLoss loss, double z) noexcept;

/// Pr[y = +1 | x] from the score. Throws UsageError for non-finite f.
double prob_positive(double f, Link link);
double prob_positive(double f, MarginLoss loss);

/// sum_i b_i loss(y_i f(x_i)); b_i = 1 for unweighted data.
double empirical_loss(const AdditiveModel& model, const Dataset& ds, MarginLoss loss);
double empirical_loss(std::span<const double> scores, const Dataset& ds, MarginLoss loss);

struct CheckLine {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool passed() const noexcept;
};

/// One "PASS|FAIL name measured=... expected=... delta=... tol=..." line per check.
void write_check_report(const CheckReport& report, std::ostream& out);

/// Compares g(z) = ln(1 + e^{-2z}) + 1 - ln 2 with e^{-z} at zero: value,
/// first and second derivative by central differences (step 1e-4, tolerance
/// 1e-5), and bounds |g(z) - e^{-z}| / |z|^3 over grid points with
/// 1e-2 <= |z| <= 0.1.
CheckReport taylor_match_check(std::span<const double> grid);

/// ln(1 + e^{-2z}) <= e^{-z} on every grid point.
CheckReport upper_bound_check(std::span<const double> grid);

/// For each p, minimizes p e^{-f} + (1-p) e^{f} and p ln(1+e^{-2f}) + (1-p) ln(1+e^{2f})
/// numerically and compares both minimizers with 1/2 ln(p/(1-p)) (tolerance 1e-6).
/// Throws UsageError for p outside (0,1).
CheckReport common_minimizer_check(std::span<const double> probabilities);

} // namespace boostkit
