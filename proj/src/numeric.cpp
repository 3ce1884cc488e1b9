#include "collapse/numeric.hpp"

#include <stdexcept>

#include "collapse/quadrature.hpp"

namespace collapse {

double sine_integral(double x) {
  if (x < 0.0) return -sine_integral(-x);
  if (x == 0.0) return 0.0;
  if (x <= 200.0) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-15;
    spec.oscillation_period = 2.0 * std::numbers::pi;
    return integrate_finite([](double u) { return sinc(u); }, 0.0, x, spec).value;
  }
  // asymptotic expansion, truncation error ~ 720/x^6
  const double ix = 1.0 / x, ix2 = ix * ix;
  const double f = ix * (1.0 - 2.0 * ix2 * (1.0 - 12.0 * ix2));
  const double g = ix2 * (1.0 - 6.0 * ix2 * (1.0 - 20.0 * ix2));
  return 0.5 * std::numbers::pi - std::cos(x) * f - std::sin(x) * g;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need matching arrays, n >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.slope * x[i] - fit.intercept;
      ss += r * r;
    }
    fit.slope_stderr = std::sqrt(ss / (n - 2.0) * n / denom);
  }
  return fit;
}

double round_1sf(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double e = std::floor(std::log10(std::abs(v)));
  const double scale = std::pow(10.0, e);
  double m = std::round(std::abs(v) / scale);
  double ee = scale;
  if (m >= 10.0) {
    m = 1.0;
    ee = scale * 10.0;
  }
  return std::copysign(m * ee, v);
}

bool agrees_1sf(double value, double printed) {
  if (printed == 0.0) return std::abs(value) < 0.5;
  const double e = std::floor(std::log10(std::abs(printed)));
  const double half_digit = 0.5 * std::pow(10.0, e);
  return std::abs(value - printed) <= half_digit * (1.0 + 1e-6);
}

}  // namespace collapse
