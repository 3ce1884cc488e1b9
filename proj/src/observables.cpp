#include "collapse/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "collapse/correlators.hpp"
#include "collapse/numeric.hpp"
#include "collapse/units.hpp"

namespace collapse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kESquared = 1.0 / 137.04;
const double kBohrRadius = 0.529e-8 * units::cm;

inline double bose_weight(double omega, double zeta, double T) {
  const double x = (omega - zeta) / T;
  if (x > 745.0) return 0.0;
  return 1.0 / std::expm1(x);
}

double species_factor(const std::vector<ParticleSpecies>& species) {
  double s = 0.0;
  for (const auto& sp : species) s += sp.count * sp.coupling * sp.coupling / sp.inertial_mass;
  return s;
}

// oscillation-aligned breakpoints for mass-shell k-integrals
std::vector<double> shell_breaks(double mu, double t, double k_max, std::size_t cap) {
  std::vector<double> pts{0.0, k_max};
  if (t > 0.0 && std::isfinite(t)) {
    const double omega_max = std::sqrt(k_max * k_max + mu * mu);
    for (std::size_t j = 1; j < cap; ++j) {
      const double w = mu + static_cast<double>(j) * kPi / t;
      if (w >= omega_max) break;
      pts.push_back(std::sqrt(w * w - mu * mu));
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

enum class TimeWeight { Sin, OneMinusCos, One };

double apply_tw(TimeWeight tw, double omega, double t) {
  switch (tw) {
    case TimeWeight::Sin: return std::sin(omega * t);
    case TimeWeight::OneMinusCos: return one_minus_cos(omega * t);
    case TimeWeight::One: return 1.0;
  }
  return 0.0;
}

// (1/2pi^2) int k^4 W(omega_k) tw(omega_k t) / omega_k^pow dk over the
// thermal mass shell
double thermal_k4_integral(double mu, double T, double zeta, double t, int pow,
                           TimeWeight tw, const QuadratureSpec& spec) {
  const double omega_max = mu + 75.0 * T;
  const double k_max = std::sqrt(omega_max * omega_max - mu * mu);
  auto pts = shell_breaks(mu, t, k_max, std::max<std::size_t>(2, spec.max_evals / 30));
  auto res = integrate_breakpoints(
      [&](double k) {
        const double w = std::sqrt(k * k + mu * mu);
        return std::pow(k, 4) * bose_weight(w, zeta, T) * apply_tw(tw, w, t) /
               std::pow(w, pow);
      },
      pts, spec);
  if (!res.converged) throw ConvergenceError("energy integral unconverged (thermal)");
  return res.value / (2.0 * kPi * kPi);
}

double dilute_k4_integral(const DiluteNr& m, double t, int mu_pow, TimeWeight tw,
                          const QuadratureSpec& spec) {
  const double A = std::exp(-(m.mu - m.zeta) / m.temperature);
  const double k_max = 16.0 * std::sqrt(2.0 * m.mu * m.temperature);
  std::vector<double> pts{0.0, k_max};
  if (t > 0.0 && std::isfinite(t)) {
    const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 30);
    for (std::size_t j = 1; j < cap; ++j) {
      const double k = std::sqrt(2.0 * m.mu * static_cast<double>(j) * kPi / t);
      if (k >= k_max) break;
      pts.push_back(k);
    }
    std::sort(pts.begin(), pts.end());
  }
  auto res = integrate_breakpoints(
      [&](double k) {
        const double w = m.mu + k * k / (2.0 * m.mu);
        return std::pow(k, 4) * std::exp(-k * k / (2.0 * m.mu * m.temperature)) *
               apply_tw(tw, w, t);
      },
      pts, spec);
  if (!res.converged) throw ConvergenceError("energy integral unconverged (dilute)");
  return A * res.value / (2.0 * kPi * kPi * std::pow(m.mu, mu_pow));
}

// int_0^Omega om^{power} tw(om t) W(om) dom for the unparticle spectral form
double unparticle_omega_integral(const Unparticle& m, double t, double power, TimeWeight tw,
                                 const QuadratureSpec& spec) {
  const double omega_max = m.temperature * (50.0 + 12.0 * std::max(1.0, 2.0 * m.d));
  std::vector<double> pts{0.0, omega_max};
  if (t > 0.0 && std::isfinite(t)) {
    const std::size_t cap = std::max<std::size_t>(2, spec.max_evals / 30);
    for (std::size_t j = 1; j < cap; ++j) {
      const double w = static_cast<double>(j) * kPi / t;
      if (w >= omega_max) break;
      pts.push_back(w);
    }
    std::sort(pts.begin(), pts.end());
  }
  auto res = integrate_breakpoints(
      [&](double w) {
        const double W = bose_weight(w, m.zeta, m.temperature);
        if (W == 0.0) return 0.0;
        // fold the time factor so the omega -> 0 behavior stays explicit
        double v = std::pow(w, power) * W;
        if (tw == TimeWeight::Sin) return v * std::sin(w * t);
        if (tw == TimeWeight::OneMinusCos) return v * one_minus_cos(w * t);
        return v;
      },
      pts, spec);
  if (!res.converged) throw ConvergenceError("energy integral unconverged (unparticle)");
  return res.value;
}

double unparticle_energy_prefactor(const Unparticle& m, double factor) {
  // 3 gamma (sum m^2/M) Lambda^{2(1-d)} / (2 pi)^2 * Gamma(3/2)Gamma(d)/Gamma(3/2+d)
  const double beta =
      std::exp(std::lgamma(1.5) + std::lgamma(m.d) - std::lgamma(1.5 + m.d));
  return 3.0 * m.gamma * factor * std::pow(m.lambda, 2.0 * (1.0 - m.d)) * beta /
         (4.0 * kPi * kPi);
}

}  // namespace

void validate(const std::vector<ParticleSpecies>& species) {
  if (species.empty()) throw ConfigError("species list is empty");
  for (const auto& sp : species) {
    if (!(sp.coupling > 0.0)) throw ConfigError("species coupling must be > 0");
    if (!(sp.inertial_mass > 0.0)) throw ConfigError("species inertial mass must be > 0");
    if (!(sp.count > 0.0)) throw ConfigError("species count must be > 0");
  }
}

double energy_rate(const NoiseModel& model, const std::vector<ParticleSpecies>& species,
                   double t, const QuadratureSpec& spec) {
  validate(model);
  validate(species);
  if (t < 0.0) throw DomainError("energy_rate: t must be >= 0");
  const double factor = species_factor(species);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl> || std::is_same_v<T, CutoffProduct>) {
          const double k_max = 16.0 / m.r_c;
          auto res = integrate_finite(
              [&](double k) {
                return std::pow(k, 4) * fourier_Fhat(model, k, t, spec);
              },
              0.0, k_max, spec);
          if (!res.converged) throw ConvergenceError("energy_rate unconverged");
          return coupling(model) * factor * res.value / (2.0 * kPi * kPi);
        } else if constexpr (std::is_same_v<T, Thermal>) {
          return m.gamma * factor *
                 thermal_k4_integral(m.mu, m.temperature, m.zeta, t, 2, TimeWeight::Sin, spec);
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          return m.gamma * factor * dilute_k4_integral(m, t, 2, TimeWeight::Sin, spec);
        } else {
          return unparticle_energy_prefactor(m, factor) *
                 unparticle_omega_integral(m, t, 2.0 * m.d, TimeWeight::Sin, spec);
        }
      },
      model);
}

double csl_energy_rate_closed(const WhiteCsl& model,
                              const std::vector<ParticleSpecies>& species) {
  validate(species);
  return 3.0 * model.gamma * species_factor(species) /
         (32.0 * std::pow(kPi, 1.5) * std::pow(model.r_c, 5));
}

EnergyTotal energy_total(const NoiseModel& model, const std::vector<ParticleSpecies>& species,
                         double t, const QuadratureSpec& spec) {
  validate(model);
  validate(species);
  if (t < 0.0) throw DomainError("energy_total: t must be >= 0");
  const double factor = species_factor(species);
  const bool asymptote = std::isinf(t);
  EnergyTotal out;
  if (t == 0.0) return out;

  if (const auto* w = std::get_if<WhiteCsl>(&model)) {
    if (asymptote) {
      out.divergent = true;
      out.growth_exponent = 1.0;  // constant rate: linear growth
      return out;
    }
    out.value = csl_energy_rate_closed(*w, species) * t;
    return out;
  }
  if (const auto* cp = std::get_if<CutoffProduct>(&model)) {
    if (asymptote)
      throw ConfigError(
          "energy_total: t = inf for the product model depends on the infrared behavior "
          "of gamma(omega); evaluate at finite t");
    // Delta E(t) = factor/(2pi^2) int k^4 e^{-k^2 rc^2} dk * I_factor(t)
    //            = factor/(2pi^2) (3 sqrt(pi)/8) rc^{-5} * [corr_I time factor]
    // reuse corr_I at r = 0 divided by G(0):
    const double g0 = std::pow(4.0 * kPi * cp->r_c * cp->r_c, -1.5);
    const double time_integral = corr_I(model, 0.0, t, spec) / g0;
    const double kint = 3.0 * std::sqrt(kPi) / (8.0 * std::pow(cp->r_c, 5));
    out.value = factor * kint * time_integral / (2.0 * kPi * kPi);
    return out;
  }
  if (const auto* th = std::get_if<Thermal>(&model)) {
    out.value = th->gamma * factor *
                thermal_k4_integral(th->mu, th->temperature, th->zeta, t, 3,
                                    asymptote ? TimeWeight::One : TimeWeight::OneMinusCos,
                                    spec);
    return out;
  }
  if (const auto* dl = std::get_if<DiluteNr>(&model)) {
    out.value = dl->gamma * factor *
                dilute_k4_integral(*dl, t, 3,
                                   asymptote ? TimeWeight::One : TimeWeight::OneMinusCos,
                                   spec);
    return out;
  }
  const auto& u = std::get<Unparticle>(model);
  const double pref = unparticle_energy_prefactor(u, factor);
  if (!asymptote) {
    out.value =
        pref * unparticle_omega_integral(u, t, 2.0 * u.d - 1.0, TimeWeight::OneMinusCos, spec);
    return out;
  }
  if (u.zeta < 0.0 || u.d > 0.5) {
    out.value =
        pref * unparticle_omega_integral(u, t, 2.0 * u.d - 1.0, TimeWeight::One, spec);
    return out;
  }
  // zeta = 0, d <= 1/2: total grows as t^{1-2d}; fit the exponent over the
  // last decade of a log-spaced scan
  out.divergent = true;
  std::vector<double> lt, le;
  const double t1 = 1e4 / u.temperature;
  for (int i = 0; i < 5; ++i) {
    const double ti = t1 * std::pow(10.0, -1.0 + i * 0.25);
    const double e =
        pref * unparticle_omega_integral(u, ti, 2.0 * u.d - 1.0, TimeWeight::OneMinusCos, spec);
    lt.push_back(std::log(ti));
    le.push_back(std::log(e));
  }
  auto fit = linear_fit(lt, le);
  out.growth_exponent = fit.slope;
  out.exponent_stderr = fit.slope_stderr;
  return out;
}

SpectrumPoint gamma_spectrum(const NoiseModel& model, double p, const QuadratureSpec&) {
  validate(model);
  double mu, T, zeta;
  bool dilute = false;
  if (const auto* th = std::get_if<Thermal>(&model)) {
    mu = th->mu;
    T = th->temperature;
    zeta = th->zeta;
  } else if (const auto* dl = std::get_if<DiluteNr>(&model)) {
    mu = dl->mu;
    T = dl->temperature;
    zeta = dl->zeta;
    dilute = true;
  } else {
    throw ConfigError("gamma_spectrum: requires a mass-shell model (Thermal or DiluteNr)");
  }
  SpectrumPoint pt;
  pt.p = p;
  if (!(p > 0.0)) throw DomainError("gamma_spectrum: photon energy must be > 0");
  if (p <= mu) {
    pt.below_threshold = true;
    return pt;
  }
  const double gamma = coupling(model);
  const double k = std::sqrt(p * p - mu * mu);
  double f;
  if (dilute) {
    const double x = (p - zeta) / T;
    f = x > 745.0 ? 0.0 : std::exp(-x);
  } else {
    f = bose_weight(p, zeta, T);
  }
  const double atomic = 1.0 - 1.0 / std::pow(1.0 + std::pow(p * kBohrRadius / 2.0, 2), 2);
  pt.dP_dp = 2.0 * atomic * gamma * kESquared * std::pow(k, 3) * f / (3.0 * kPi * kPi * p);
  return pt;
}

MarkovDiagnostic markov_diagnostic(const NoiseModel& model, double particle_mass) {
  validate(model);
  if (!(particle_mass > 0.0)) throw DomainError("markov_diagnostic: mass must be > 0");
  MarkovDiagnostic d;
  d.k_max = std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          return 1.0 / m.r_c;
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          using Shape = SpectralFunction::Shape;
          const auto& g = m.gamma_of_omega;
          // bounded-support spectra: the binding scale is the smaller of the
          // spatial cutoff and the frequency cutoff
          if (g.shape == Shape::Step) return std::min(1.0 / m.r_c, g.omega_c);
          if (g.shape == Shape::Tabulated)
            return std::min(1.0 / m.r_c, g.table.back().first);
          throw DomainError(
              "markov_diagnostic: unsupported for gamma(omega) with unbounded support");
        } else if constexpr (std::is_same_v<T, Thermal> || std::is_same_v<T, DiluteNr>) {
          return std::sqrt(2.0 * m.mu * m.temperature);
        } else {
          return m.temperature;  // Bose factor cuts the unparticle spectrum at ~T
        }
      },
      model);
  d.ratio = d.k_max / (2.0 * particle_mass);
  return d;
}

double markov_O_eval(double k, double p, double tau, double mass) {
  if (!(mass > 0.0)) throw DomainError("markov_O_eval: mass must be > 0");
  const double a = k * p * tau / mass;
  const double b = k * k * tau / (2.0 * mass);
  return k * k * std::cos(a) * std::cos(b) - 2.0 * p * k * std::sin(a) * std::sin(b);
}

double lindblad_kernel(const NoiseModel& model, double mass, double k, double t,
                       const QuadratureSpec& spec) {
  if (!(mass > 0.0)) throw DomainError("lindblad_kernel: mass must be > 0");
  return 2.0 * mass * mass * coupling(model) * fourier_Fhat(model, k, t, spec);
}

}  // namespace collapse
