#pragma once

#include <array>
#include <string>
#include <vector>

#include "collapse/errors.hpp"

// Dark-matter scenario scans: derived correlation length, temperature and
// reduction time, reduction exponents, required densities, the fifth-force
// bound, and the four survey tables over the standard (mu, v, n_out) grid.
//
// All inputs and outputs are natural units (GeV powers) unless a name says
// otherwise; the tables render in the paper's display units (cm, s,
// GeV cm^-1, GeV cm^-3).

namespace collapse {

struct DarkMatterScenario {
  double mu = 0.0;       // dark-matter particle mass
  double v_rms = 0.0;    // in units of c
  double rho_m = 0.0;    // mass density, natural units (GeV^4)
  double gamma = 0.0;    // noise coupling 1/M^2 (GeV^-2)
  double n_per_bunch = 1.0;
  double n_bunches = 1.0;
  double mu5 = 0.0;      // fifth-force scale (optional, for the bound)
};

void validate(const DarkMatterScenario& s);

struct ScenarioDerived {
  double r_c = 0.0;          // sqrt(3/2)/(mu v)
  double temperature = 0.0;  // mu v^2 / 3
  double t_r = 0.0;          // 1/T
  double chem_factor = 0.0;  // e^{-(mu-zeta)/T} = (rho_m/mu) 8 pi^{3/2} r_C^3
  double exponent_2gamma = 0.0;
  bool dilute_valid = true;  // chem_factor < 1
};

ScenarioDerived dm_derived(const DarkMatterScenario& s);

// 2 Gamma(inf) = 4 (m_N/M)^2 (rho_m/mu^4) n^2 N
double dm_reduction_exponent(const DarkMatterScenario& s);

struct RequiredDensity {
  // gamma rho_m for 2 Gamma(inf) = 1, printed-formula convention:
  // 1.5e13 (mu/GeV)^2 / n_out,  GeV cm^-1
  double gamma_rho_m_gev_per_cm = 0.0;
  // rho_m = mu^4 / (4 gamma n_out) with gamma read as the CSL-normalized
  // coupling, GeV cm^-3 (the documented Table-4 convention)
  double rho_m_gev_per_cm3 = 0.0;
};

RequiredDensity dm_required_density(double mu, double n_out, double gamma);

struct FifthForceBound {
  double exponent10 = 0.0;  // 19 - 0.22 mu/mu5
  double m_min_gev = 0.0;   // 10^exponent10, 0 on underflow
};

FifthForceBound fifth_force_bound(double mu, double mu5);

// --- survey tables ----------------------------------------------------------

struct DmTables {
  // paper grid
  std::vector<double> mu_kev;             // {1, 10, 1e2, 1e3, 1e4, 1e6}
  std::vector<std::string> v_labels;      // {v_h, v_s, v_e}
  std::vector<double> v_over_c;           // {220, 30, 8} km/s over c
  std::vector<double> n_out;              // {1e22, 1e8}

  // [v][mu] correlation length r_C in cm, and reduction time t_R in s
  std::vector<std::vector<double>> r_c_cm;
  std::vector<std::vector<double>> t_r_s;
  // [n_out][mu] gamma rho_m in GeV/cm and rho_m in GeV/cm^3 (gamma = 1 TeV^-2)
  std::vector<std::vector<double>> gamma_rho_m;
  std::vector<std::vector<double>> rho_m;
};

DmTables make_tables();

}  // namespace collapse
