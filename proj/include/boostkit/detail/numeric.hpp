#pragma once

#include <cmath>

namespace boostkit::detail {

/// 1 / (1 + e^{-x}) without overflow.
inline double sigmoid(double x) noexcept {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// ln(1 + e^x) without overflow.
inline double softplus(double x) noexcept {
  if (x > 0.0) {
    return x + std::log1p(std::exp(-x));
  }
  return std::log1p(std::exp(x));
}

} // namespace boostkit::detail
