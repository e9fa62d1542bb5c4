#pragma once

#include <cmath>

namespace hypadams::detail {

inline double log_sinh(double x) {
  if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

// value * sinh(x)^p without intermediate overflow.
inline double times_sinh_power(double value, double x, int p) {
  if (value == 0.0) return 0.0;
  if (x < 200.0) return value * std::pow(std::sinh(x), p);
  const double mag = std::log(std::abs(value)) + p * log_sinh(x);
  return std::copysign(std::exp(mag), value);
}

} // namespace hypadams::detail
