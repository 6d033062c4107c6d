#include "boostkit/detail/convex_search.hpp"

#include <algorithm>
#include <cmath>

#include "boostkit/error.hpp"

namespace boostkit::detail {

ConvexMinimum minimize_convex(const std::function<double(double)>& derivative,
                              const std::function<double(double)>& second_derivative, double cap,
                              double gradient_tolerance) {
  if (!(cap > 0.0) || !std::isfinite(cap)) {
    throw UsageError("convex search needs a positive finite cap");
  }
  const double g0 = derivative(0.0);
  if (std::abs(g0) <= gradient_tolerance) {
    return {0.0, false};
  }
  // The minimizer lies on the side where the derivative is negative.
  double lo = 0.0;
  double hi = 0.0;
  if (g0 < 0.0) {
    double step = 1.0;
    hi = std::min(step, cap);
    while (derivative(hi) < 0.0) {
      if (hi >= cap) {
        return {cap, true};
      }
      lo = hi;
      step *= 2.0;
      hi = std::min(hi + step, cap);
    }
  } else {
    double step = 1.0;
    lo = -std::min(step, cap);
    while (derivative(lo) > 0.0) {
      if (lo <= -cap) {
        return {-cap, true};
      }
      hi = lo;
      step *= 2.0;
      lo = std::max(lo - step, -cap);
    }
  }

  // Invariant: derivative(lo) <= 0 <= derivative(hi).
  double x = lo + (hi - lo) / 2.0;
  for (int iteration = 0; iteration < 500; ++iteration) {
    const double g = derivative(x);
    if (std::abs(g) <= gradient_tolerance) {
      return {x, false};
    }
    if (g < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) {
      return {x, false};
    }
    const double curvature = second_derivative(x);
    double next = curvature > 0.0 ? x - g / curvature : mid;
    if (!(next > lo && next < hi)) {
      next = mid;
    }
    // Rounding floor: the derivative cannot be resolved any further.
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
      return {next, false};
    }
    x = next;
  }
  return {x, false};
}

} // namespace boostkit::detail
