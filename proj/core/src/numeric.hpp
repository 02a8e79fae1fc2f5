#pragma once

#include <cmath>

namespace authentext::detail {

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// ln(1 + exp(-m)) without overflow.
inline double log1p_exp_neg(double m) noexcept {
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

}  // namespace authentext::detail
