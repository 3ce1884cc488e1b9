#include "collapse/phenomenology.hpp"

#include <cmath>
#include <numbers>

#include "collapse/units.hpp"

namespace collapse {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void validate(const DarkMatterScenario& s) {
  if (!(s.mu > 0.0)) throw ConfigError("DarkMatterScenario: mu must be > 0");
  if (!(s.v_rms > 0.0 && s.v_rms < 1.0))
    throw ConfigError("DarkMatterScenario: v_rms must lie in (0, 1)");
  if (!(s.rho_m > 0.0)) throw ConfigError("DarkMatterScenario: rho_m must be > 0");
  if (!(s.gamma > 0.0)) throw ConfigError("DarkMatterScenario: gamma must be > 0");
  if (!(s.n_per_bunch > 0.0) || !(s.n_bunches > 0.0))
    throw ConfigError("DarkMatterScenario: bunch counts must be > 0");
}

ScenarioDerived dm_derived(const DarkMatterScenario& s) {
  validate(s);
  ScenarioDerived d;
  d.r_c = std::sqrt(1.5) / (s.mu * s.v_rms);
  d.temperature = s.mu * s.v_rms * s.v_rms / 3.0;
  d.t_r = 1.0 / d.temperature;
  d.chem_factor = (s.rho_m / s.mu) * 8.0 * std::pow(kPi, 1.5) * std::pow(d.r_c, 3);
  d.dilute_valid = d.chem_factor < 1.0;
  d.exponent_2gamma = dm_reduction_exponent(s);
  return d;
}

double dm_reduction_exponent(const DarkMatterScenario& s) {
  validate(s);
  const double mn = units::nucleon_mass;
  return 4.0 * s.gamma * mn * mn * (s.rho_m / std::pow(s.mu, 4)) * s.n_per_bunch *
         s.n_per_bunch * s.n_bunches;
}

RequiredDensity dm_required_density(double mu, double n_out, double gamma) {
  if (!(mu > 0.0) || !(n_out > 0.0) || !(gamma > 0.0))
    throw ConfigError("dm_required_density: inputs must be > 0");
  RequiredDensity r;
  r.gamma_rho_m_gev_per_cm = 1.5e13 * mu * mu / n_out;
  // Table-4 convention: rho = mu^4/(4 gamma n_out) natural, with gamma the
  // CSL-normalized coupling; 1 GeV^4 = (1/hbar_c)^3 GeV cm^-3
  const double gev4_to_gev_per_cm3 = std::pow(units::cm, 3);  // (GeV^-1 per cm)^-3
  r.rho_m_gev_per_cm3 =
      std::pow(mu, 4) / (4.0 * gamma * n_out) * gev4_to_gev_per_cm3;
  return r;
}

FifthForceBound fifth_force_bound(double mu, double mu5) {
  if (!(mu5 > 0.0)) throw ConfigError("fifth_force_bound: mu5 must be > 0");
  if (mu < 0.0) throw ConfigError("fifth_force_bound: mu must be >= 0");
  FifthForceBound b;
  b.exponent10 = 19.0 - 0.22 * mu / mu5;
  b.m_min_gev = b.exponent10 < -300.0 ? 0.0 : std::pow(10.0, b.exponent10);
  return b;
}

DmTables make_tables() {
  DmTables t;
  t.mu_kev = {1.0, 10.0, 1e2, 1e3, 1e4, 1e6};
  t.v_labels = {"v_h", "v_s", "v_e"};
  for (double kms : {220.0, 30.0, 8.0}) t.v_over_c.push_back(kms / units::speed_of_light_km_s);
  t.n_out = {1e22, 1e8};

  t.r_c_cm.resize(t.v_over_c.size());
  t.t_r_s.resize(t.v_over_c.size());
  for (std::size_t vi = 0; vi < t.v_over_c.size(); ++vi) {
    for (double mu_kev : t.mu_kev) {
      const double mu = mu_kev * units::kev;
      const double v = t.v_over_c[vi];
      t.r_c_cm[vi].push_back(units::to_cm(std::sqrt(1.5) / (mu * v)));
      t.t_r_s[vi].push_back(units::to_seconds(3.0 / (mu * v * v)));
    }
  }

  const double gamma_table4 = 1e-6;  // 1 TeV^-2
  t.gamma_rho_m.resize(t.n_out.size());
  t.rho_m.resize(t.n_out.size());
  for (std::size_t ni = 0; ni < t.n_out.size(); ++ni) {
    for (double mu_kev : t.mu_kev) {
      const double mu = mu_kev * units::kev;
      const auto rd = dm_required_density(mu, t.n_out[ni], gamma_table4);
      t.gamma_rho_m[ni].push_back(rd.gamma_rho_m_gev_per_cm);
      t.rho_m[ni].push_back(rd.rho_m_gev_per_cm3);
    }
  }
  return t;
}

}  // namespace collapse
