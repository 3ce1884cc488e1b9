#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

// Small numeric helpers shared across modules: stable trig combinations,
// the sine integral, and least-squares fitting for growth exponents.

namespace collapse {

// sin(x)/x  (0 at infinity: fully decorrelated limit)
inline double sinc(double x) {
  if (std::isinf(x)) return 0.0;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

// 1 - sin(x)/x, accurate for small x
inline double one_minus_sinc(double x) {
  if (std::isinf(x)) return 1.0;
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
  }
  return 1.0 - std::sin(x) / x;
}

// (1 - cos(x)) / x^2, bounded by 1/2, -> 1/2 as x -> 0
inline double one_minus_cos_over_x2(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 0.5 - x2 / 24.0 * (1.0 - x2 / 30.0);
  }
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s / (x * x);
}

inline double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

// Sine integral Si(x) = int_0^x sin(u)/u du, x >= 0.
double sine_integral(double x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Rounds to one significant figure (round-half-away-from-zero).
double round_1sf(double v);

// True when `printed` is a one-significant-figure representation of `value`
// (within half a unit in the leading digit, with a small slack for exact
// half-way cases).
bool agrees_1sf(double value, double printed);

}  // namespace collapse
