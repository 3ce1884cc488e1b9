#include "collapse/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "collapse/numeric.hpp"

namespace collapse {

namespace {

constexpr double kPi = std::numbers::pi;

// Bose occupancy as a function of the mode energy; expm1 keeps the dilute
// tail accurate and overflows gracefully to 0.
inline double bose_weight(double omega, double zeta, double T) {
  const double x = (omega - zeta) / T;
  if (x > 745.0) return 0.0;
  return 1.0 / std::expm1(x);
}

// --- white-noise spatial kernel ------------------------------------------

double white_G(double r, double r_c) {
  const double pref = std::pow(4.0 * kPi * r_c * r_c, -1.5);
  return pref * std::exp(-r * r / (4.0 * r_c * r_c));
}

// --- product-model time factors -------------------------------------------
// delta_gamma(tau) = (1/pi) int gamma(w) cos(w tau) dw and its first two
// time integrals.  The parametric shapes have closed forms; tabulated data
// goes through quadrature.

double product_D_factor(const SpectralFunction& g, double tau, const QuadratureSpec& spec) {
  using Shape = SpectralFunction::Shape;
  switch (g.shape) {
    case Shape::Constant:
    case Shape::HighPass:
      throw DomainError(
          "corr_D: distributional kernel (delta-function time correlation); use corr_F");
    case Shape::Step:
      if (tau == 0.0) return g.gamma0 * g.omega_c / kPi;
      return g.gamma0 * std::sin(g.omega_c * tau) / (kPi * tau);
    case Shape::Tabulated: {
      const double wmax = g.table.back().first;
      QuadratureSpec s = spec;
      if (tau > 0.0) s.oscillation_period = 2.0 * kPi / tau;
      auto r = integrate_finite([&](double w) { return g(w) * std::cos(w * tau); }, 0.0,
                                wmax, s);
      if (!r.converged) throw ConvergenceError("product correlator: D quadrature unconverged");
      return r.value / kPi;
    }
  }
  return 0.0;
}

double product_F_factor(const SpectralFunction& g, double t, const QuadratureSpec& spec) {
  using Shape = SpectralFunction::Shape;
  if (t == 0.0) return 0.0;
  switch (g.shape) {
    case Shape::Constant:
      return 0.5 * g.gamma0;
    case Shape::Step:
      return g.gamma0 * sine_integral(g.omega_c * t) / kPi;
    case Shape::HighPass:
      return 0.5 * g.gamma0 * std::exp(-g.omega_0 * t);
    case Shape::Tabulated: {
      const double wmax = g.table.back().first;
      QuadratureSpec s = spec;
      s.oscillation_period = 2.0 * kPi / t;
      auto r = integrate_finite([&](double w) { return g(w) * t * sinc(w * t); }, 0.0,
                                wmax, s);
      if (!r.converged) throw ConvergenceError("product correlator: F quadrature unconverged");
      return r.value / kPi;
    }
  }
  return 0.0;
}

double product_I_factor(const SpectralFunction& g, double t, const QuadratureSpec& spec) {
  using Shape = SpectralFunction::Shape;
  if (t == 0.0) return 0.0;
  switch (g.shape) {
    case Shape::Constant:
      return 0.5 * g.gamma0 * t;
    case Shape::Step: {
      const double x = g.omega_c * t;
      return g.gamma0 * (t * sine_integral(x) - one_minus_cos(x) / g.omega_c) / kPi;
    }
    case Shape::HighPass:
      return 0.5 * g.gamma0 * (1.0 - std::exp(-g.omega_0 * t)) / g.omega_0;
    case Shape::Tabulated: {
      const double wmax = g.table.back().first;
      QuadratureSpec s = spec;
      s.oscillation_period = 2.0 * kPi / t;
      auto r = integrate_finite(
          [&](double w) { return g(w) * t * t * one_minus_cos_over_x2(w * t); }, 0.0, wmax, s);
      if (!r.converged) throw ConvergenceError("product correlator: I quadrature unconverged");
      return r.value / kPi;
    }
  }
  return 0.0;
}

// --- thermal (full dispersion) radial integrals ----------------------------

// breakpoints where the phase omega_k * t advances by pi, merged with the
// half-periods of j0(k r); keeps panel boundaries on the oscillation lobes
std::vector<double> thermal_breaks(double mu, double t, double r, double k_max,
                                   std::size_t cap) {
  std::vector<double> pts{0.0, k_max};
  const double omega_max = std::sqrt(k_max * k_max + mu * mu);
  if (t > 0.0 && std::isfinite(t)) {
    for (std::size_t j = 1; j < cap; ++j) {
      const double w = mu + static_cast<double>(j) * kPi / t;
      if (w >= omega_max) break;
      pts.push_back(std::sqrt(w * w - mu * mu));
    }
  }
  if (r > 0.0 && std::isfinite(r)) {
    for (std::size_t j = 1; j < cap; ++j) {
      const double k = static_cast<double>(j) * kPi / r;
      if (k >= k_max) break;
      pts.push_back(k);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double thermal_k_max(const Thermal& m) {
  const double omega_max = m.mu + 75.0 * m.temperature;
  return std::sqrt(omega_max * omega_max - m.mu * m.mu);
}

enum class TimeFactor { Cos, Sin, OneMinusCos };

double thermal_radial(const Thermal& m, double r, double t, int omega_power,
                      TimeFactor tf, bool subtracted, const QuadratureSpec& spec) {
  const double k_max = thermal_k_max(m);
  const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 30);
  auto pts = thermal_breaks(m.mu, t, r, k_max, cap);
  auto f = [&](double k) {
    const double w = std::sqrt(k * k + m.mu * m.mu);
    double v = k * k * bose_weight(w, m.zeta, m.temperature) * std::pow(w, omega_power);
    v *= subtracted ? one_minus_sinc(k * r) : sinc(k * r);
    switch (tf) {
      case TimeFactor::Cos: v *= std::cos(w * t); break;
      case TimeFactor::Sin: v *= std::sin(w * t); break;
      case TimeFactor::OneMinusCos: v *= one_minus_cos(w * t); break;
    }
    return v;
  };
  auto res = integrate_breakpoints(f, pts, spec);
  if (!res.converged)
    throw ConvergenceError("thermal correlator: radial quadrature unconverged");
  return res.value / (2.0 * kPi * kPi);
}

// --- dilute nonrelativistic model ------------------------------------------

struct DiluteParts {
  double A;    // e^{-(mu - zeta)/T}
  double P;    // (mu T / 2 pi)^{3/2}
  double s;    // (1 + t^2 T^2)^{-3/4}
  double phi;  // mu t + (3/2) atan(t T)
  double E1;   // e^{-mu T R^2 / 2}
  double E2;   // same, shrunk by 1 + t^2 T^2
  double psi;  // phi - (mu t T^2 R^2/2)/(1 + t^2 T^2)
};

DiluteParts dilute_parts(const DiluteNr& m, double r, double t) {
  DiluteParts p;
  const double tT = t * m.temperature;
  const double den = 1.0 + tT * tT;
  p.A = std::exp(-(m.mu - m.zeta) / m.temperature);
  p.P = std::pow(m.mu * m.temperature / (2.0 * kPi), 1.5);
  p.s = std::pow(den, -0.75);
  p.phi = m.mu * t + 1.5 * std::atan(tT);
  const double q = 0.5 * m.mu * m.temperature * r * r;
  p.E1 = std::exp(-q);
  p.E2 = std::exp(-q / den);
  p.psi = p.phi - m.mu * t * m.temperature * m.temperature * r * r / (2.0 * den);
  return p;
}

std::vector<double> dilute_breaks(const DiluteNr& m, double r, double t, double k_max,
                                  std::size_t cap) {
  std::vector<double> pts{0.0, k_max};
  if (t > 0.0 && std::isfinite(t)) {
    for (std::size_t j = 1; j < cap; ++j) {
      const double k2 = 2.0 * m.mu * static_cast<double>(j) * kPi / t;
      const double k = std::sqrt(k2);
      if (k >= k_max) break;
      pts.push_back(k);
    }
  }
  if (r > 0.0 && std::isfinite(r)) {
    for (std::size_t j = 1; j < cap; ++j) {
      const double k = static_cast<double>(j) * kPi / r;
      if (k >= k_max) break;
      pts.push_back(k);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double dilute_radial(const DiluteNr& m, double r, double t, TimeFactor tf, bool subtracted,
                     const QuadratureSpec& spec) {
  const double k_max = 14.0 * std::sqrt(2.0 * m.mu * m.temperature);
  const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 30);
  auto pts = dilute_breaks(m, r, t, k_max, cap);
  auto f = [&](double k) {
    double v = k * k * std::exp(-k * k / (2.0 * m.mu * m.temperature));
    v *= subtracted ? one_minus_sinc(k * r) : sinc(k * r);
    const double w = m.mu + k * k / (2.0 * m.mu);
    switch (tf) {
      case TimeFactor::Cos: v *= std::cos(w * t); break;
      case TimeFactor::Sin: v *= std::sin(w * t); break;
      case TimeFactor::OneMinusCos: v *= one_minus_cos(w * t); break;
    }
    return v;
  };
  auto res = integrate_breakpoints(f, pts, spec);
  if (!res.converged)
    throw ConvergenceError("dilute correlator: radial quadrature unconverged");
  return res.value / (2.0 * kPi * kPi);
}

// --- unparticle: cached inner v-integral ------------------------------------
// v_cos(d, z) = int_0^1 cos(v z) (1 - v^2)^{d-1} dv.  The (1-v)^{d-1}
// endpoint factor is removed exactly by v = 1 - w^{1/d}; values are cached
// on a uniform z-grid per scaling dimension, with a Taylor series at small z
// (where v_sub would lose digits to cancellation) and the Hankel asymptotics
// of J_{d-1/2} beyond the grid.

class VProfile {
 public:
  static std::shared_ptr<const VProfile> get(double d);

  double c0() const { return c0_; }

  double cos_part(double z) const {
    z = std::abs(z);
    if (z <= kSeries) return c0_ - sub_series(z);
    if (z <= zmax_) return grid_interp(z);
    return asymptotic(z);
  }

  double sub_part(double z) const {
    z = std::abs(z);
    if (z <= kSeries) return sub_series(z);
    if (z <= zmax_) return c0_ - grid_interp(z);
    return c0_ - asymptotic(z);
  }

  double sub_over_z2(double z) const {
    z = std::abs(z);
    if (z < 1e-150) return coef_[0];
    if (z <= kSeries) return sub_series(z) / (z * z);
    return sub_part(z) / (z * z);
  }

 private:
  static constexpr double kSeries = 2.0;

  explicit VProfile(double d);

  double sub_series(double z) const {
    // sum_{m>=1} (-1)^{m+1} z^{2m} M_{2m}/(2m)!  (factored as z^2 * series)
    const double z2 = z * z;
    double term = 1.0, acc = 0.0;
    for (std::size_t m = 0; m < coef_.size(); ++m) {
      acc += coef_[m] * term;
      term *= -z2;
    }
    return acc * z2;
  }

  double grid_interp(double z) const {
    const double u = z / h_;
    std::size_t i = static_cast<std::size_t>(u);
    if (i < 1) i = 1;
    if (i > grid_.size() - 3) i = grid_.size() - 3;
    const double s = u - static_cast<double>(i);
    // 4-point Lagrange on nodes i-1 .. i+2
    const double f0 = grid_[i - 1], f1 = grid_[i], f2 = grid_[i + 1], f3 = grid_[i + 2];
    return f1 + s * ((f2 - f0) / 2.0 +
                     s * ((f0 - 2.0 * f1 + f2) / 2.0 +
                          s * ((f3 - f0) / 6.0 + (f1 - f2) / 2.0)));
  }

  double asymptotic(double z) const {
    // (sqrt(pi)/2) Gamma(d) (2/z)^{d-1/2} J_{d-1/2}(z), Hankel expansion
    const double nu = d_ - 0.5;
    const double mu = 4.0 * nu * nu;
    const double chi = z - nu * kPi / 2.0 - kPi / 4.0;
    const double i8z = 1.0 / (8.0 * z);
    const double p = 1.0 - (mu - 1.0) * (mu - 9.0) / 2.0 * i8z * i8z +
                     (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) / 24.0 *
                         std::pow(i8z, 4);
    const double q = (mu - 1.0) * i8z -
                     (mu - 1.0) * (mu - 9.0) * (mu - 25.0) / 6.0 * std::pow(i8z, 3);
    const double bess = std::sqrt(2.0 / (kPi * z)) * (std::cos(chi) * p - std::sin(chi) * q);
    return 0.5 * std::sqrt(kPi) * std::exp(std::lgamma(d_)) *
           std::pow(2.0 / z, d_ - 0.5) * bess;
  }

  double d_;
  double c0_ = 0.0;
  std::vector<double> coef_;  // M_{2m}/(2m)! for m = 1..N
  std::vector<double> grid_;
  double h_ = 0.02;
  double zmax_ = 400.0;
};

VProfile::VProfile(double d) : d_(d) {
  c0_ = 0.5 * std::sqrt(kPi) * std::exp(std::lgamma(d) - std::lgamma(d + 0.5));
  // series coefficients via the moment recurrence
  // M_{2m}/M_{2m-2} = (m - 1/2)/(m + d - 1/2)
  double c = c0_;
  coef_.reserve(24);
  for (int m = 1; m <= 24; ++m) {
    c *= (m - 0.5) / ((m + d - 0.5) * (2.0 * m) * (2.0 * m - 1.0));
    coef_.push_back(c);
  }
  // grid of v_cos on [0, zmax]
  const std::size_t n = static_cast<std::size_t>(zmax_ / h_) + 1;
  grid_.resize(n + 2);
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-13;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double z = static_cast<double>(i) * h_;
    // substituted integral: (1/d) int_0^1 (1+v)^{d-1} cos(v z) dw, v = 1 - w^{1/d}
    auto f = [&](double w) {
      const double v = 1.0 - std::pow(w, 1.0 / d_);
      return std::pow(1.0 + v, d_ - 1.0) * std::cos(v * z);
    };
    std::vector<double> pts{0.0, 1.0};
    for (int j = 1; j * kPi < z; ++j) {
      const double v = static_cast<double>(j) * kPi / z;
      pts.push_back(std::pow(1.0 - v, d_));
    }
    std::sort(pts.begin(), pts.end());
    auto r = integrate_breakpoints(f, pts, spec);
    grid_[i] = r.value / d_;
  }
}

std::shared_ptr<const VProfile> VProfile::get(double d) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const VProfile>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  auto p = std::shared_ptr<const VProfile>(new VProfile(d));
  cache.emplace(d, p);
  return p;
}

// --- unparticle omega-integrals ---------------------------------------------

double unparticle_omega_max(const Unparticle& m) {
  return m.temperature * (50.0 + 12.0 * std::max(1.0, 2.0 * m.d));
}

std::vector<double> osc_breaks(double a, double b, double t, double r, std::size_t cap) {
  std::vector<double> pts{a, b};
  for (double freq : {t, r}) {
    if (!(freq > 0.0) || !std::isfinite(freq)) continue;
    const double step = kPi / freq;
    const std::size_t count = static_cast<std::size_t>((b - a) / step);
    if (count + 2 > cap) {
      // too many lobes for the budget: coarse uniform split, refined adaptively
      const std::size_t n = cap;
      for (std::size_t j = 1; j < n; ++j)
        pts.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(n));
      break;
    }
    for (std::size_t j = 1; j <= count; ++j) {
      const double w = a + static_cast<double>(j) * step;
      if (w >= b) break;
      pts.push_back(w);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

void require_unparticle_absolute_kernel(const Unparticle& m) {
  if (m.zeta == 0.0 && m.d <= 0.5)
    throw DomainError(
        "unparticle kernel is infrared-divergent for zeta = 0, d <= 1/2; "
        "only subtracted kernels (corr_I_diff / corr_F_diff) are finite");
}

// common driver:
//   absolute:   (L'/2pi^2) int om^{2d-1} W(om) tf(om t) v_cos(om r) dom
//   subtracted: (L'/2pi^2) int om^{2d+1} W(om) tf(om t) r^2 [v_sub/z^2](om r) dom
// where tf is cos(x), t*sinc(x), or t^2*(1-cos x)/x^2; every factor stays
// bounded near om = 0, so no spurious inf*0 at small abscissae.
double unparticle_radial(const Unparticle& m, double r, double t, TimeFactor tf,
                         bool subtracted, const QuadratureSpec& spec) {
  auto prof = VProfile::get(m.d);
  const double pref = std::pow(m.lambda, 2.0 * (1.0 - m.d)) / (2.0 * kPi * kPi);
  const double omega_max = unparticle_omega_max(m);
  const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 30);
  auto pts = osc_breaks(0.0, omega_max, t, r, cap);
  const double power = subtracted ? 2.0 * m.d + 1.0 : 2.0 * m.d - 1.0;

  auto f = [&](double w) {
    const double W = bose_weight(w, m.zeta, m.temperature);
    if (W == 0.0) return 0.0;
    double v = std::pow(w, power) * W;
    v *= subtracted ? r * r * prof->sub_over_z2(w * r) : prof->cos_part(w * r);
    const double x = w * t;
    switch (tf) {
      case TimeFactor::Cos: v *= std::cos(x); break;
      case TimeFactor::Sin: v *= t * sinc(x); break;
      case TimeFactor::OneMinusCos: v *= t * t * one_minus_cos_over_x2(x); break;
    }
    return v;
  };
  auto res = integrate_breakpoints(f, pts, spec);
  if (!res.converged)
    throw ConvergenceError("unparticle correlator: omega quadrature unconverged");
  return pref * res.value;
}

}  // namespace

// --- dilute closed forms (public) -------------------------------------------

DiluteKernels dilute_closed_forms(const DiluteNr& m, double r, double t) {
  const auto p = dilute_parts(m, r, t);
  DiluteKernels k;
  const double mu = m.mu;
  k.d_diff = (p.A / mu) * p.P * p.s * (std::cos(p.phi) - p.E2 * std::cos(p.psi));
  k.f_diff = (p.A / (mu * mu)) * p.P * p.s * (std::sin(p.phi) - p.E2 * std::sin(p.psi));
  k.i_diff = (p.A / (mu * mu * mu)) * p.P *
             (1.0 - p.E1 - p.s * (std::cos(p.phi) - p.E2 * std::cos(p.psi)));
  return k;
}

DiluteKernels dilute_quadrature_forms(const DiluteNr& m, double r, double t,
                                      const QuadratureSpec& spec) {
  const double A = std::exp(-(m.mu - m.zeta) / m.temperature);
  DiluteKernels k;
  k.d_diff = (A / m.mu) * dilute_radial(m, r, t, TimeFactor::Cos, true, spec);
  k.f_diff = (A / (m.mu * m.mu)) * dilute_radial(m, r, t, TimeFactor::Sin, true, spec);
  k.i_diff =
      (A / (m.mu * m.mu * m.mu)) * dilute_radial(m, r, t, TimeFactor::OneMinusCos, true, spec);
  return k;
}

double dilute_i_diff_infinity(const DiluteNr& m, double r) {
  const double A = std::exp(-(m.mu - m.zeta) / m.temperature);
  const double P = std::pow(m.temperature / (2.0 * kPi * m.mu), 1.5);
  return A * P * (1.0 - std::exp(-0.5 * m.mu * m.temperature * r * r));
}

// --- dispatchers -------------------------------------------------------------

double corr_D(const NoiseModel& model, double r, double t, const QuadratureSpec& spec) {
  validate(model);
  r = std::abs(r);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          throw DomainError("corr_D: white-noise kernel is distributional in time; use corr_F");
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          return white_G(r, m.r_c) * product_D_factor(m.gamma_of_omega, std::abs(t), spec);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          return thermal_radial(m, r, t, -1, TimeFactor::Cos, false, spec);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          const auto p = dilute_parts(m, r, t);
          return (p.A / m.mu) * p.P * p.s * p.E2 * std::cos(p.psi);
        } else {
          require_unparticle_absolute_kernel(m);
          return unparticle_radial(m, r, t, TimeFactor::Cos, false, spec);
        }
      },
      model);
}

double corr_F(const NoiseModel& model, double r, double t, const QuadratureSpec& spec) {
  validate(model);
  if (t < 0.0) throw DomainError("corr_F: t must be >= 0");
  r = std::abs(r);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          return 0.5 * white_G(r, m.r_c);
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          return white_G(r, m.r_c) * product_F_factor(m.gamma_of_omega, t, spec);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          return thermal_radial(m, r, t, -2, TimeFactor::Sin, false, spec);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          const auto p = dilute_parts(m, r, t);
          return (p.A / (m.mu * m.mu)) * p.P * p.s * p.E2 * std::sin(p.psi);
        } else {
          require_unparticle_absolute_kernel(m);
          return unparticle_radial(m, r, t, TimeFactor::Sin, false, spec);
        }
      },
      model);
}

double corr_I(const NoiseModel& model, double r, double t, const QuadratureSpec& spec) {
  validate(model);
  if (t < 0.0) throw DomainError("corr_I: t must be >= 0");
  r = std::abs(r);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          return 0.5 * t * white_G(r, m.r_c);
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          return white_G(r, m.r_c) * product_I_factor(m.gamma_of_omega, t, spec);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          return thermal_radial(m, r, t, -3, TimeFactor::OneMinusCos, false, spec);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          const auto p = dilute_parts(m, r, t);
          return (p.A / (m.mu * m.mu * m.mu)) * p.P * (p.E1 - p.s * p.E2 * std::cos(p.psi));
        } else {
          require_unparticle_absolute_kernel(m);
          return unparticle_radial(m, r, t, TimeFactor::OneMinusCos, false, spec);
        }
      },
      model);
}

double corr_F_diff(const NoiseModel& model, double r, double t, const QuadratureSpec& spec) {
  validate(model);
  if (t < 0.0) throw DomainError("corr_F_diff: t must be >= 0");
  r = std::abs(r);
  if (r == 0.0) return 0.0;
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          return 0.5 * (white_G(0.0, m.r_c) - white_G(r, m.r_c));
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          return (white_G(0.0, m.r_c) - white_G(r, m.r_c)) *
                 product_F_factor(m.gamma_of_omega, t, spec);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          return thermal_radial(m, r, t, -2, TimeFactor::Sin, true, spec);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          return dilute_closed_forms(m, r, t).f_diff;
        } else {
          return unparticle_radial(m, r, t, TimeFactor::Sin, true, spec);
        }
      },
      model);
}

double corr_I_diff(const NoiseModel& model, double r, double t, const QuadratureSpec& spec) {
  validate(model);
  if (t < 0.0) throw DomainError("corr_I_diff: t must be >= 0");
  r = std::abs(r);
  if (r == 0.0) return 0.0;
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          return 0.5 * t * (white_G(0.0, m.r_c) - white_G(r, m.r_c));
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          return (white_G(0.0, m.r_c) - white_G(r, m.r_c)) *
                 product_I_factor(m.gamma_of_omega, t, spec);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          return thermal_radial(m, r, t, -3, TimeFactor::OneMinusCos, true, spec);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          return dilute_closed_forms(m, r, t).i_diff;
        } else {
          return unparticle_radial(m, r, t, TimeFactor::OneMinusCos, true, spec);
        }
      },
      model);
}

// --- Fourier transform --------------------------------------------------------

namespace unparticle_detail {

double v_cos(double d, double z) { return VProfile::get(d)->cos_part(z); }
double v_sub(double d, double z) { return VProfile::get(d)->sub_part(z); }
double v_sub_over_z2(double d, double z) { return VProfile::get(d)->sub_over_z2(z); }

// raw spectral form, valid for d > 1 (d > 3/2 at k = 0):
// 2 (d-1) Lambda' int_k^inf (om^2 - k^2)^{d-2} W(om) sin(om t) / om  dom
double fhat_raw(const Unparticle& m, double k, double t, const QuadratureSpec& spec) {
  const double lam = std::pow(m.lambda, 2.0 * (1.0 - m.d));
  const double omega_max = std::max(unparticle_omega_max(m), 2.0 * k);
  auto g = [&](double w) {
    return bose_weight(w, m.zeta, m.temperature) * std::sin(w * t) / w;
  };
  if (k == 0.0) {
    if (!(m.d > 1.5) || (m.zeta == 0.0 && !(m.d > 2.0)))
      throw DomainError("fourier_Fhat: unparticle mode is infrared-divergent at k = 0");
    const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 30);
    auto pts = osc_breaks(0.0, omega_max, t, 0.0, cap);
    auto res = integrate_breakpoints(
        [&](double w) { return std::pow(w, 2.0 * m.d - 4.0) * g(w); }, pts, spec);
    if (!res.converged) throw ConvergenceError("fourier_Fhat: unconverged at k = 0");
    return 2.0 * (m.d - 1.0) * lam * res.value;
  }
  // u = om - k, then u = x^{1/(d-1)} removes the endpoint singularity exactly
  const double p = m.d - 1.0;
  const double u_max = omega_max - k;
  const double x_max = std::pow(u_max, p);
  std::vector<double> pts{0.0, x_max};
  if (t > 0.0) {
    for (std::size_t j = 1; j < std::max<std::size_t>(2, spec.max_evals / 30); ++j) {
      const double u = static_cast<double>(j) * kPi / t;
      if (u >= u_max) break;
      pts.push_back(std::pow(u, p));
    }
  }
  std::sort(pts.begin(), pts.end());
  auto res = integrate_breakpoints(
      [&](double x) {
        const double u = std::pow(x, 1.0 / p);
        const double w = k + u;
        return std::pow(u + 2.0 * k, m.d - 2.0) * g(w);
      },
      pts, spec);
  if (!res.converged) throw ConvergenceError("fourier_Fhat: raw route unconverged");
  return 2.0 * lam * res.value;  // (d-1) absorbed by the substitution Jacobian
}

// subtraction-continued form, valid for 0 < d < 3/2 at k > 0:
//   Fhat = L' Gamma(d) Gamma(3/2-d)/Gamma(1/2) g(k) k^{2d-3}
//        + 2 (d-1) L' int_k^inf (om^2-k^2)^{d-2} [g(om) - g(k)] dom
// The remainder integrand behaves as u^{d-1} near om = k (u = om - k); the
// innermost disc u < u0 is integrated analytically with g(om) - g(k)
// linearized, which avoids amplifying fp cancellation through the u = x^{1/d}
// substitution used on the rest.
double fhat_continued(const Unparticle& m, double k, double t, const QuadratureSpec& spec) {
  if (!(k > 0.0))
    throw DomainError("fourier_Fhat: unparticle mode is infrared-divergent at k = 0");
  const double lam = std::pow(m.lambda, 2.0 * (1.0 - m.d));
  const double omega_max = std::max(unparticle_omega_max(m), 4.0 * k);
  const double T = m.temperature;
  auto g = [&](double w) {
    return bose_weight(w, m.zeta, m.temperature) * std::sin(w * t) / w;
  };
  const double gk = g(k);
  const double bterm = std::exp(std::lgamma(m.d) + std::lgamma(1.5 - m.d)) /
                       std::sqrt(kPi) * gk * std::pow(k, 2.0 * m.d - 3.0);

  // g'(k), with W' = -W (1 + W)/T
  const double Wk = bose_weight(k, m.zeta, m.temperature);
  const double Wpk = -Wk * (1.0 + Wk) / T;
  const double gpk = Wpk * std::sin(k * t) / k + Wk * t * std::cos(k * t) / k -
                     Wk * std::sin(k * t) / (k * k);

  double scale = std::min(k, T);
  if (t > 0.0) scale = std::min(scale, 1.0 / t);
  const double u0 = 1e-5 * scale;
  // inner disc: int_0^{u0} u^{d-2} (u+2k)^{d-2} (g - gk) du
  //           ~ g'(k) (2k)^{d-2} u0^d / d
  const double inner = gpk * std::pow(2.0 * k, m.d - 2.0) * std::pow(u0, m.d) / m.d;

  // bulk via u = x^{1/d}: u^{d-1} du = dx/d, h(u) = (u+2k)^{d-2} (g-gk)/u
  const double p = m.d;
  const double u_max = omega_max - k;
  std::vector<double> pts{std::pow(u0, p), std::pow(u_max, p)};
  if (t > 0.0) {
    for (std::size_t j = 1; j < std::max<std::size_t>(2, spec.max_evals / 30); ++j) {
      const double u = static_cast<double>(j) * kPi / t;
      if (u >= u_max) break;
      if (u > u0) pts.push_back(std::pow(u, p));
    }
  }
  std::sort(pts.begin(), pts.end());
  auto rem = integrate_breakpoints(
      [&](double x) {
        const double u = std::pow(x, 1.0 / p);
        return std::pow(u + 2.0 * k, m.d - 2.0) * (g(k + u) - gk) / (u * p);
      },
      pts, spec);
  if (!rem.converged) throw ConvergenceError("fourier_Fhat: continued route unconverged");

  // tail beyond omega_max where g ~ 0: -g(k) int_Omega^inf (om^2-k^2)^{d-2} dom
  QuadratureSpec ts = spec;
  ts.oscillation_period = 0.0;
  auto tail = integrate_finite(
      [&](double u) {
        return std::pow(u, 2.0 - 2.0 * m.d) * std::pow(1.0 - k * k * u * u, m.d - 2.0);
      },
      0.0, 1.0 / omega_max, ts);
  return lam * bterm +
         2.0 * (m.d - 1.0) * lam * (inner + rem.value - gk * tail.value);
}

double corr_D_raw_vform(const Unparticle& m, double r, double t, const QuadratureSpec& spec) {
  if (!(m.d > 1.0)) throw DomainError("raw v-form requires d > 1");
  const double lam = std::pow(m.lambda, 2.0 * (1.0 - m.d));
  const double omega_max = unparticle_omega_max(m);
  // inner: int_0^1 v sin(v om r) (1-v^2)^{d-2} dv, substitution a = d-2
  auto inner = [&](double w) {
    const double z = w * r;
    const double p = m.d - 1.0;  // a + 1
    std::vector<double> pts{0.0, 1.0};
    for (int j = 1; j * kPi < z; ++j)
      pts.push_back(std::pow(1.0 - static_cast<double>(j) * kPi / z, p));
    std::sort(pts.begin(), pts.end());
    QuadratureSpec is = spec;
    is.rel_tol = std::max(spec.rel_tol * 0.1, 1e-12);
    auto res = integrate_breakpoints(
        [&](double wv) {
          const double v = 1.0 - std::pow(wv, 1.0 / p);
          return std::pow(1.0 + v, m.d - 2.0) * v * std::sin(v * z);
        },
        pts, is);
    return res.value / p;
  };
  const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 3000);
  auto pts = osc_breaks(0.0, omega_max, t, r, cap);
  auto res = integrate_breakpoints(
      [&](double w) {
        return std::pow(w, 2.0 * (m.d - 1.0)) * std::cos(w * t) *
               bose_weight(w, m.zeta, m.temperature) * inner(w);
      },
      pts, spec);
  if (!res.converged) throw ConvergenceError("unparticle raw v-form unconverged");
  return (m.d - 1.0) * lam * res.value / (kPi * kPi * r);
}

}  // namespace unparticle_detail

double fourier_Fhat(const NoiseModel& model, double k, double t, const QuadratureSpec& spec) {
  validate(model);
  if (k < 0.0) throw DomainError("fourier_Fhat: k must be >= 0 (isotropic kernel)");
  if (t < 0.0) throw DomainError("fourier_Fhat: t must be >= 0");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          return 0.5 * std::exp(-k * k * m.r_c * m.r_c);
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          return std::exp(-k * k * m.r_c * m.r_c) * product_F_factor(m.gamma_of_omega, t, spec);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          const double w = std::sqrt(k * k + m.mu * m.mu);
          return bose_weight(w, m.zeta, m.temperature) * std::sin(w * t) / (w * w);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          const double A = std::exp(-(m.mu - m.zeta) / m.temperature);
          const double w = m.mu + k * k / (2.0 * m.mu);
          return A * std::exp(-k * k / (2.0 * m.mu * m.temperature)) * std::sin(w * t) /
                 (m.mu * m.mu);
        } else {
          if (t == 0.0) return 0.0;
          if (k == 0.0 || m.d >= 1.25) return unparticle_detail::fhat_raw(m, k, t, spec);
          return unparticle_detail::fhat_continued(m, k, t, spec);
        }
      },
      model);
}

}  // namespace collapse
