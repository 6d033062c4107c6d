#pragma once

#include <functional>

namespace boostkit::detail {

struct ConvexMinimum {
  double argmin = 0.0;
  /// True when the minimizer lay beyond [-cap, cap] and was clipped to the edge.
  bool capped = false;
};

/// Minimizes a smooth convex function on [-cap, cap] given its first and
/// second derivatives. Safeguarded Newton: iterates stay inside a sign-change
/// bracket of the derivative and fall back to bisection when a Newton step
/// leaves it. Stops at |derivative| <= gradient_tolerance or when the bracket
/// collapses to adjacent doubles.
ConvexMinimum minimize_convex(const std::function<double(double)>& derivative,
                              const std::function<double(double)>& second_derivative, double cap,
                              double gradient_tolerance);

} // namespace boostkit::detail
